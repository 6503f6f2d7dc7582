//! End-to-end exercise of the public API: generate, persist, reload,
//! index, search.

use tsdtw::{
    build_index, dtw, envelope_streaming, generate_database, lb_keogh, load_dataset, nn_search,
    save_dataset, Dataset, DatasetFormat, Exponent, Family, SearchParams, Strategy, TimeSeries,
};

#[test]
fn generate_save_load_search() {
    let db = generate_database::<f64>(Family::ControlChart, 6, 5, 60, 42).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let bin_path = dir.path().join("cc.bin");
    save_dataset(&db, &bin_path, DatasetFormat::Binary).unwrap();
    let reloaded = load_dataset(&bin_path, DatasetFormat::Binary).unwrap();
    assert_eq!(db, reloaded);

    let csv_path = dir.path().join("cc.csv");
    save_dataset(&db, &csv_path, DatasetFormat::Csv { labeled: true }).unwrap();
    let from_csv = load_dataset(&csv_path, DatasetFormat::Csv { labeled: true }).unwrap();
    assert_eq!(db.labels(), from_csv.labels());

    let params = SearchParams::with_default_window(Exponent::Finite(1), db.series_len());
    let (index, cover) = build_index(&reloaded, 8).unwrap();
    let query = db.get(13).clone();
    for strategy in Strategy::ALL {
        let out = nn_search(
            &query,
            &reloaded,
            strategy,
            &params,
            Some((&index, &cover)),
            Default::default(),
        )
        .unwrap();
        assert_eq!(out.best_id, 13, "{strategy}");
        assert_eq!(out.best_dist, 0.0, "{strategy}");
    }
}

#[test]
fn generic_core_works_in_f32() {
    let series: Vec<TimeSeries<f32>> = (0..20)
        .map(|k| {
            TimeSeries::new((0..32).map(|i| ((i + k) as f32 * 0.3).sin()).collect()).unwrap()
        })
        .collect();
    let db = Dataset::new(series, None).unwrap();
    let query = db.get(5).clone();
    let params = SearchParams::new(Exponent::Finite(2), 3);

    let env = envelope_streaming(&query, 3);
    let bound = lb_keogh(db.get(7), &env, Exponent::Finite(2), None).unwrap();
    let d = dtw(&query, db.get(7), &params).unwrap();
    assert!(bound.value <= d + 1e-5);

    let out = tsdtw::nn_linear_improved(&query, &db, &params).unwrap();
    assert_eq!(out.best_id, 5);
    assert_eq!(out.best_dist, 0.0f32);
}
