//! In-memory R*-tree over projected points, with a best-first candidate
//! stream ordered by `l_1` distance to a query rectangle.
//!
//! Insertion follows the classic R*-tree heuristics: subtrees are chosen by
//! minimum overlap enlargement at the leaf level and minimum area
//! enlargement above it, the first overflow per level triggers forced
//! reinsertion of the entries farthest from the node center, and further
//! overflows split along the axis with the smallest margin sum, picking the
//! distribution with the least overlap.
//!
//! The candidate stream keeps a priority queue of nodes and entries keyed
//! by their minimum `l_1` distance to the query rectangle. Node keys lower-
//! bound every descendant, so entries pop in nondecreasing distance order
//! and a caller-supplied cutoff prunes whole subtrees.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::reduction::{rect_dist_l1, Hyperrectangle, ProjectedPoint};
use crate::scalar::Sample;

/// Default node capacity; minimum fill is 40 %.
pub const DEFAULT_MAX_ENTRIES: usize = 32;

#[derive(Debug, Clone)]
struct ItemEntry<T: Sample> {
    point: ProjectedPoint<T>,
    id: usize,
}

#[derive(Debug, Clone)]
enum Node<T: Sample> {
    Leaf {
        rect: Hyperrectangle<T>,
        items: Vec<ItemEntry<T>>,
    },
    Inner {
        rect: Hyperrectangle<T>,
        level: usize,
        children: Vec<Node<T>>,
    },
}

impl<T: Sample> Node<T> {
    fn level(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Inner { level, .. } => *level,
        }
    }

    fn rect(&self) -> &Hyperrectangle<T> {
        match self {
            Node::Leaf { rect, .. } => rect,
            Node::Inner { rect, .. } => rect,
        }
    }

    fn entry_count(&self) -> usize {
        match self {
            Node::Leaf { items, .. } => items.len(),
            Node::Inner { children, .. } => children.len(),
        }
    }

    fn recompute_rect(&mut self) {
        match self {
            Node::Leaf { rect, items } => {
                *rect = bounding_rect(items.iter().map(|e| Hyperrectangle::from_point(&e.point)));
            }
            Node::Inner { rect, children, .. } => {
                *rect = bounding_rect(children.iter().map(|c| c.rect().clone()));
            }
        }
    }
}

fn bounding_rect<T: Sample>(
    mut rects: impl Iterator<Item = Hyperrectangle<T>>,
) -> Hyperrectangle<T> {
    let first = rects.next().expect("bounding box of at least one rect");
    rects.fold(first, |acc, r| acc.union(&r))
}

enum PendingEntry<T: Sample> {
    Item(ItemEntry<T>),
    Subtree(Node<T>),
}

impl<T: Sample> PendingEntry<T> {
    fn rect(&self) -> Hyperrectangle<T> {
        match self {
            PendingEntry::Item(e) => Hyperrectangle::from_point(&e.point),
            PendingEntry::Subtree(n) => n.rect().clone(),
        }
    }

    /// Level of the node whose entry list receives this entry.
    fn container_level(&self) -> usize {
        match self {
            PendingEntry::Item(_) => 0,
            PendingEntry::Subtree(n) => n.level() + 1,
        }
    }
}

/// Immutable-after-build spatial index over `(ProjectedPoint, id)` entries.
#[derive(Debug, Clone)]
pub struct RTreeIndex<T: Sample> {
    root: Option<Node<T>>,
    dim: Option<usize>,
    len: usize,
    max_entries: usize,
    min_entries: usize,
    reinsert_count: usize,
}

impl<T: Sample> RTreeIndex<T> {
    /// Build by repeated insertion with the default fanout.
    pub fn build(points: Vec<(ProjectedPoint<T>, usize)>) -> Result<Self> {
        Self::build_with_capacity(points, DEFAULT_MAX_ENTRIES)
    }

    pub fn build_with_capacity(
        points: Vec<(ProjectedPoint<T>, usize)>,
        max_entries: usize,
    ) -> Result<Self> {
        if max_entries < 4 {
            return Err(Error::InvalidParameter(
                "node capacity must be at least 4".into(),
            ));
        }
        let min_entries = ((max_entries as f64 * 0.4) as usize).max(2);
        let mut tree = Self {
            root: None,
            dim: None,
            len: 0,
            max_entries,
            min_entries,
            reinsert_count: ((max_entries + 1) * 3 / 10).max(1),
        };
        for (point, id) in points {
            match tree.dim {
                None => tree.dim = Some(point.dim()),
                Some(d) if d != point.dim() => {
                    return Err(Error::DimensionMismatch {
                        left: d,
                        right: point.dim(),
                    })
                }
                _ => {}
            }
            tree.insert(ItemEntry { point, id });
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    fn insert(&mut self, item: ItemEntry<T>) {
        self.len += 1;
        let root = match self.root.take() {
            None => {
                let rect = Hyperrectangle::from_point(&item.point);
                self.root = Some(Node::Leaf {
                    rect,
                    items: vec![item],
                });
                return;
            }
            Some(root) => root,
        };
        self.root = Some(root);

        let mut pending: Vec<PendingEntry<T>> = vec![PendingEntry::Item(item)];
        // One forced reinsertion per level per top-level insert.
        let mut reinsert_spent = vec![false; self.root.as_ref().expect("set above").level() + 1];

        while let Some(entry) = pending.pop() {
            let root_level = self.root.as_ref().expect("root present").level();
            let target = entry.container_level();
            debug_assert!(target <= root_level);
            let split = insert_entry(
                self.root.as_mut().expect("root present"),
                root_level,
                entry,
                target,
                self.max_entries,
                self.min_entries,
                self.reinsert_count,
                &mut reinsert_spent,
                &mut pending,
            );
            if let Some(sibling) = split {
                let old_root = self.root.take().expect("root present");
                let rect = old_root.rect().union(sibling.rect());
                let level = root_level + 1;
                self.root = Some(Node::Inner {
                    rect,
                    level,
                    children: vec![old_root, sibling],
                });
                reinsert_spent.resize(level + 1, false);
            }
        }
    }

    /// Best-first stream of `(id, l1 distance)` pairs for a query rectangle.
    pub fn candidates(&self, query: &Hyperrectangle<T>) -> Result<CandidateStream<'_, T>> {
        if let Some(d) = self.dim {
            if d != query.dim() {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: query.dim(),
                });
            }
        }
        let mut heap = BinaryHeap::new();
        if let Some(root) = &self.root {
            heap.push(HeapEntry {
                dist: root.rect().min_dist_l1(query),
                tie: 0,
                target: Target::Node(root),
            });
        }
        Ok(CandidateStream {
            heap,
            query: query.clone(),
        })
    }

    /// Structural invariants: containment, fill factors, uniform depth.
    #[cfg(test)]
    fn check_structure(&self) -> std::result::Result<(), String> {
        let root = match &self.root {
            None => return Ok(()),
            Some(r) => r,
        };
        let mut count = 0usize;
        check_node(
            root,
            root.level(),
            true,
            self.min_entries,
            self.max_entries,
            &mut count,
        )?;
        if count != self.len {
            return Err(format!("stored {count} items, expected {}", self.len));
        }
        Ok(())
    }
}

#[cfg(test)]
fn check_node<T: Sample>(
    node: &Node<T>,
    expected_level: usize,
    is_root: bool,
    min: usize,
    max: usize,
    count: &mut usize,
) -> std::result::Result<(), String> {
    if node.level() != expected_level {
        return Err(format!(
            "level {} where {} expected",
            node.level(),
            expected_level
        ));
    }
    let entries = node.entry_count();
    if entries > max {
        return Err(format!("node holds {entries} > {max} entries"));
    }
    if !is_root && entries < min {
        return Err(format!("node holds {entries} < {min} entries"));
    }
    if is_root && entries == 0 {
        return Err("empty root with nonzero len".into());
    }
    match node {
        Node::Leaf { rect, items } => {
            *count += items.len();
            for e in items {
                if !rect.contains_point(&e.point) {
                    return Err(format!("point {:?} outside leaf rect", e.point));
                }
            }
        }
        Node::Inner {
            rect,
            children,
            level,
        } => {
            for c in children {
                if !rect.contains_rect(c.rect()) {
                    return Err("child rect escapes parent".into());
                }
                check_node(c, level - 1, false, min, max, count)?;
            }
        }
    }
    Ok(())
}

/// Recursive insert; returns a split-off sibling when this node overflowed
/// and split.
#[allow(clippy::too_many_arguments)]
fn insert_entry<T: Sample>(
    node: &mut Node<T>,
    node_level: usize,
    entry: PendingEntry<T>,
    target_level: usize,
    max: usize,
    min: usize,
    reinsert_count: usize,
    reinsert_spent: &mut [bool],
    pending: &mut Vec<PendingEntry<T>>,
) -> Option<Node<T>> {
    if node_level == target_level {
        let entry_rect = entry.rect();
        match (&mut *node, entry) {
            (Node::Leaf { rect, items }, PendingEntry::Item(item)) => {
                *rect = rect.union(&entry_rect);
                items.push(item);
            }
            (Node::Inner { rect, children, .. }, PendingEntry::Subtree(sub)) => {
                *rect = rect.union(&entry_rect);
                children.push(sub);
            }
            _ => unreachable!("entry kind always matches its container level"),
        }
    } else {
        let (rect, children) = match node {
            Node::Inner { rect, children, .. } => (rect, children),
            Node::Leaf { .. } => unreachable!("descent stops at the target level"),
        };
        let entry_rect = entry.rect();
        let at_leaf_parent = node_level == 1;
        let chosen = choose_subtree(children, &entry_rect, at_leaf_parent);
        *rect = rect.union(&entry_rect);
        let split = insert_entry(
            &mut children[chosen],
            node_level - 1,
            entry,
            target_level,
            max,
            min,
            reinsert_count,
            reinsert_spent,
            pending,
        );
        if let Some(sibling) = split {
            children.push(sibling);
        }
    }

    if node.entry_count() <= max {
        return None;
    }
    // Overflow: forced reinsertion once per level (never at the root, whose
    // splits the caller turns into tree growth), otherwise a proper split.
    let is_root = reinsert_spent.len() == node_level + 1;
    if !is_root && !reinsert_spent[node_level] {
        reinsert_spent[node_level] = true;
        reinsert_farthest(node, reinsert_count, pending);
        None
    } else {
        Some(split_node(node, min))
    }
}

fn choose_subtree<T: Sample>(
    children: &[Node<T>],
    entry_rect: &Hyperrectangle<T>,
    at_leaf_parent: bool,
) -> usize {
    let mut best = 0usize;
    let mut best_key = (T::infinity(), T::infinity(), T::infinity());
    for (k, child) in children.iter().enumerate() {
        let enlarged = child.rect().union(entry_rect);
        let area_before = area(child.rect());
        let area_enlargement = area(&enlarged) - area_before;
        let overlap_enlargement = if at_leaf_parent {
            let mut delta = T::zero();
            for (j, other) in children.iter().enumerate() {
                if j != k {
                    delta = delta + overlap(&enlarged, other.rect())
                        - overlap(child.rect(), other.rect());
                }
            }
            delta
        } else {
            T::zero()
        };
        let key = (overlap_enlargement, area_enlargement, area_before);
        if key < best_key {
            best_key = key;
            best = k;
        }
    }
    best
}

fn area<T: Sample>(r: &Hyperrectangle<T>) -> T {
    r.lo()
        .iter()
        .zip(r.hi())
        .fold(T::one(), |acc, (&l, &h)| acc * (h - l))
}

fn overlap<T: Sample>(a: &Hyperrectangle<T>, b: &Hyperrectangle<T>) -> T {
    let mut v = T::one();
    for j in 0..a.dim() {
        let lo = a.lo()[j].max(b.lo()[j]);
        let hi = a.hi()[j].min(b.hi()[j]);
        if hi <= lo {
            return T::zero();
        }
        v = v * (hi - lo);
    }
    v
}

fn center_dist_sq<T: Sample>(a: &Hyperrectangle<T>, b: &Hyperrectangle<T>) -> T {
    let two = T::one() + T::one();
    let mut sum = T::zero();
    for j in 0..a.dim() {
        let ca = (a.lo()[j] + a.hi()[j]) / two;
        let cb = (b.lo()[j] + b.hi()[j]) / two;
        let d = ca - cb;
        sum = sum + d * d;
    }
    sum
}

/// Remove the `count` entries farthest from the node center and queue them
/// for reinsertion.
fn reinsert_farthest<T: Sample>(
    node: &mut Node<T>,
    count: usize,
    pending: &mut Vec<PendingEntry<T>>,
) {
    let node_rect = node.rect().clone();
    match node {
        Node::Leaf { items, .. } => {
            items.sort_by(|a, b| {
                let da = center_dist_sq(&Hyperrectangle::from_point(&a.point), &node_rect);
                let db = center_dist_sq(&Hyperrectangle::from_point(&b.point), &node_rect);
                db.partial_cmp(&da).expect("finite center distances")
            });
            for e in items.drain(..count) {
                pending.push(PendingEntry::Item(e));
            }
        }
        Node::Inner { children, .. } => {
            children.sort_by(|a, b| {
                let da = center_dist_sq(a.rect(), &node_rect);
                let db = center_dist_sq(b.rect(), &node_rect);
                db.partial_cmp(&da).expect("finite center distances")
            });
            for c in children.drain(..count) {
                pending.push(PendingEntry::Subtree(c));
            }
        }
    }
    node.recompute_rect();
}

/// R*-tree topological split; the node keeps one group, the sibling gets
/// the other.
fn split_node<T: Sample>(node: &mut Node<T>, min: usize) -> Node<T> {
    match node {
        Node::Leaf { items, .. } => {
            let entries = std::mem::take(items);
            let dim = entries[0].point.dim();
            let (keep, give) = split_entries(
                entries,
                dim,
                min,
                |e, a| e.point.coords()[a],
                |e, a| e.point.coords()[a],
            );
            *items = keep;
            node.recompute_rect();
            let rect = bounding_rect(give.iter().map(|e| Hyperrectangle::from_point(&e.point)));
            Node::Leaf { rect, items: give }
        }
        Node::Inner {
            level, children, ..
        } => {
            let level = *level;
            let entries = std::mem::take(children);
            let dim = entries[0].rect().dim();
            let (keep, give) = split_entries(
                entries,
                dim,
                min,
                |e, a| e.rect().lo()[a],
                |e, a| e.rect().hi()[a],
            );
            *children = keep;
            node.recompute_rect();
            let rect = bounding_rect(give.iter().map(|c| c.rect().clone()));
            Node::Inner {
                rect,
                level,
                children: give,
            }
        }
    }
}

/// Choose the split axis by minimal margin sum over all distributions of
/// both sort orders, then the distribution on that axis with minimal
/// overlap (ties by minimal combined area). Returns the two groups.
fn split_entries<E, T: Sample>(
    entries: Vec<E>,
    dim: usize,
    min: usize,
    lo_of: impl Fn(&E, usize) -> T,
    hi_of: impl Fn(&E, usize) -> T,
) -> (Vec<E>, Vec<E>) {
    let total = entries.len();
    debug_assert!(total >= 2 * min);

    let bbox_of = |idx: &[usize]| -> (Vec<T>, Vec<T>) {
        let mut lo = vec![T::infinity(); dim];
        let mut hi = vec![T::neg_infinity(); dim];
        for &i in idx {
            for a in 0..dim {
                lo[a] = lo[a].min(lo_of(&entries[i], a));
                hi[a] = hi[a].max(hi_of(&entries[i], a));
            }
        }
        (lo, hi)
    };
    let margin_of = |bb: &(Vec<T>, Vec<T>)| -> T {
        bb.0.iter()
            .zip(&bb.1)
            .fold(T::zero(), |acc, (&l, &h)| acc + (h - l))
    };
    let area_of = |bb: &(Vec<T>, Vec<T>)| -> T {
        bb.0.iter()
            .zip(&bb.1)
            .fold(T::one(), |acc, (&l, &h)| acc * (h - l))
    };
    let overlap_of = |a: &(Vec<T>, Vec<T>), b: &(Vec<T>, Vec<T>)| -> T {
        let mut v = T::one();
        for j in 0..dim {
            let lo = a.0[j].max(b.0[j]);
            let hi = a.1[j].min(b.1[j]);
            if hi <= lo {
                return T::zero();
            }
            v = v * (hi - lo);
        }
        v
    };

    let mut best_axis = 0usize;
    let mut best_axis_margin = T::infinity();
    let mut best_for_axis: Vec<(bool, usize)> = Vec::with_capacity(dim); // (sort_by_hi, first-group size)

    for axis in 0..dim {
        let mut margin_sum = T::zero();
        let mut axis_best_key = (T::infinity(), T::infinity());
        let mut axis_best = (false, min);
        for sort_by_hi in [false, true] {
            let mut order: Vec<usize> = (0..total).collect();
            order.sort_by(|&a, &b| {
                let ka = (lo_of(&entries[a], axis), hi_of(&entries[a], axis));
                let kb = (lo_of(&entries[b], axis), hi_of(&entries[b], axis));
                let (pa, pb) = if sort_by_hi {
                    ((ka.1, ka.0), (kb.1, kb.0))
                } else {
                    (ka, kb)
                };
                pa.partial_cmp(&pb).expect("finite coordinates")
            });
            for first in min..=(total - min) {
                let bb1 = bbox_of(&order[..first]);
                let bb2 = bbox_of(&order[first..]);
                margin_sum = margin_sum + margin_of(&bb1) + margin_of(&bb2);
                let key = (overlap_of(&bb1, &bb2), area_of(&bb1) + area_of(&bb2));
                if key < axis_best_key {
                    axis_best_key = key;
                    axis_best = (sort_by_hi, first);
                }
            }
        }
        best_for_axis.push(axis_best);
        if margin_sum < best_axis_margin {
            best_axis_margin = margin_sum;
            best_axis = axis;
        }
    }

    let (sort_by_hi, first) = best_for_axis[best_axis];
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| {
        let ka = (lo_of(&entries[a], best_axis), hi_of(&entries[a], best_axis));
        let kb = (lo_of(&entries[b], best_axis), hi_of(&entries[b], best_axis));
        let (pa, pb) = if sort_by_hi {
            ((ka.1, ka.0), (kb.1, kb.0))
        } else {
            (ka, kb)
        };
        pa.partial_cmp(&pb).expect("finite coordinates")
    });

    let mut slots: Vec<Option<E>> = entries.into_iter().map(Some).collect();
    let take = |slots: &mut Vec<Option<E>>, idx: &[usize]| -> Vec<E> {
        idx.iter()
            .map(|&i| slots[i].take().expect("each index taken once"))
            .collect()
    };
    let group1 = take(&mut slots, &order[..first]);
    let group2 = take(&mut slots, &order[first..]);
    (group1, group2)
}

enum Target<'a, T: Sample> {
    Node(&'a Node<T>),
    Item(&'a ItemEntry<T>),
}

struct HeapEntry<'a, T: Sample> {
    dist: T,
    tie: u64,
    target: Target<'a, T>,
}

impl<T: Sample> PartialEq for HeapEntry<'_, T> {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.tie == other.tie
    }
}

impl<T: Sample> Eq for HeapEntry<'_, T> {}

impl<T: Sample> PartialOrd for HeapEntry<'_, T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Sample> Ord for HeapEntry<'_, T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse for smallest-distance-first.
        // Ties pop nodes before items, then lower ids first, keeping the
        // stream deterministic.
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("distances are finite")
            .then_with(|| other.tie.cmp(&self.tie))
    }
}

/// Best-first iterator over `(id, distance)` in nondecreasing distance
/// order. [`CandidateStream::next_below`] additionally prunes everything at
/// or beyond a cutoff.
pub struct CandidateStream<'a, T: Sample> {
    heap: BinaryHeap<HeapEntry<'a, T>>,
    query: Hyperrectangle<T>,
}

impl<T: Sample> CandidateStream<'_, T> {
    /// Next candidate strictly below `bound`, or `None` once the queue
    /// minimum reaches it. Callers shrink `bound` monotonically.
    pub fn next_below(&mut self, bound: T) -> Option<(usize, T)> {
        loop {
            let top_dist = self.heap.peek()?.dist;
            if !(top_dist < bound) {
                return None;
            }
            let top = self.heap.pop().expect("peeked above");
            match top.target {
                Target::Item(e) => return Some((e.id, top.dist)),
                Target::Node(Node::Leaf { items, .. }) => {
                    for e in items {
                        let dist = rect_dist_l1(&e.point, &self.query)
                            .expect("index and query dimensions checked");
                        if dist < bound {
                            self.heap.push(HeapEntry {
                                dist,
                                tie: e.id as u64 + 1,
                                target: Target::Item(e),
                            });
                        }
                    }
                }
                Target::Node(Node::Inner { children, .. }) => {
                    for c in children {
                        let dist = c.rect().min_dist_l1(&self.query);
                        if dist < bound {
                            self.heap.push(HeapEntry {
                                dist,
                                tie: 0,
                                target: Target::Node(c),
                            });
                        }
                    }
                }
            }
        }
    }
}

impl<T: Sample> Iterator for CandidateStream<'_, T> {
    type Item = (usize, T);

    fn next(&mut self) -> Option<(usize, T)> {
        self.next_below(T::infinity())
    }
}
