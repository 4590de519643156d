//! FP-Growth: frequent itemsets from a prefix-tree compression of the
//! database.
//!
//! Mining takes two passes over the transactions. The first counts items and
//! fixes the F-list (frequent items by support descending, id ascending on
//! ties). The second inserts every transaction, filtered to frequent items and
//! reordered by the F-list, as a path of an [`FpTree`]. Nodes carrying the same
//! item are threaded into a node-link chain that starts at the header table.
//!
//! [`FpTree::mine`] then grows patterns suffix-first: for each item of the
//! F-list, least frequent first, it emits the item, gathers the item's
//! conditional pattern base from the prefix paths of its chain, builds a
//! conditional tree with its own local F-list, and recurses. A tree that is a
//! single path is finished by enumerating combinations of its nodes directly.

use rayon::prelude::*;

use crate::model::{minsup_abs, sort_canonical, FrequentItemset, ItemId, Itemset, TransactionDb};

const NONE: u32 = u32::MAX;
const ROOT: u32 = 0;

/// The frequent items of a database, in tree order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FList {
    /// `(item, support)` by support descending, id ascending on ties.
    pub items: Vec<(ItemId, u64)>,
    pub minsup_abs: u64,
}

impl FList {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn flist_from_counts(counts: &[u64], minsup_abs: u64) -> Vec<(ItemId, u64)> {
    let mut items: Vec<(ItemId, u64)> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0 && c >= minsup_abs)
        .map(|(i, &c)| (ItemId(i as u32), c))
        .collect();
    items.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    items
}

/// First scan: item supports and the F-list at `ceil(minsup_rel * n)`.
///
/// Panics if `minsup_rel` is not in `(0, 1]`.
pub fn build_flist(db: &TransactionDb, minsup_rel: f64) -> FList {
    assert!(minsup_rel > 0.0 && minsup_rel <= 1.0, "minsup_rel must lie in (0, 1], got {minsup_rel}");
    let minsup = minsup_abs(minsup_rel, db.len());
    build_flist_abs(db, minsup)
}

/// First scan with an absolute threshold (clamped to at least 1).
pub fn build_flist_abs(db: &TransactionDb, minsup_abs: u64) -> FList {
    let minsup_abs = minsup_abs.max(1);
    let mut counts = vec![0u64; db.catalog().len()];
    for t in db.transactions() {
        for i in t.items.iter() {
            counts[i.index()] += 1;
        }
    }
    FList {
        items: flist_from_counts(&counts, minsup_abs),
        minsup_abs,
    }
}

#[derive(Debug, Clone)]
struct Node {
    /// Header slot (position in this tree's F-list); `NONE` for the root.
    slot: u32,
    count: u64,
    parent: u32,
    children: Vec<u32>,
    /// Next node with the same slot.
    next: u32,
}

#[derive(Debug, Clone)]
pub struct HeaderEntry {
    pub item: ItemId,
    /// Support of the item within this tree.
    pub total: u64,
    head: u32,
    tail: u32,
}

/// Prefix tree over the frequent items of a (possibly conditional) database.
#[derive(Debug, Clone)]
pub struct FpTree {
    nodes: Vec<Node>,
    header: Vec<HeaderEntry>,
    /// ItemId index -> header slot, `NONE` when infrequent.
    slot_of: Vec<u32>,
    minsup_abs: u64,
}

impl FpTree {
    fn empty(n_items: usize, flist: &[(ItemId, u64)], minsup_abs: u64) -> Self {
        let mut slot_of = vec![NONE; n_items];
        let header = flist
            .iter()
            .enumerate()
            .map(|(s, &(item, total))| {
                slot_of[item.index()] = s as u32;
                HeaderEntry {
                    item,
                    total,
                    head: NONE,
                    tail: NONE,
                }
            })
            .collect();
        FpTree {
            nodes: vec![Node {
                slot: NONE,
                count: 0,
                parent: NONE,
                children: Vec::new(),
                next: NONE,
            }],
            header,
            slot_of,
            minsup_abs,
        }
    }

    /// Second scan: inserts each transaction of `db` as an F-list-ordered path.
    pub fn build(db: &TransactionDb, flist: &FList) -> FpTree {
        let mut tree = FpTree::empty(db.catalog().len(), &flist.items, flist.minsup_abs);
        let mut path = Vec::new();
        for t in db.transactions() {
            tree.ordered_slots(t.items.items(), &mut path);
            tree.insert(&path, 1);
        }
        tree
    }

    /// Builds a tree from weighted item lists (a pattern base), deriving the
    /// F-list from the weighted counts.
    fn from_weighted(n_items: usize, base: &[(Vec<ItemId>, u64)], minsup_abs: u64) -> FpTree {
        let mut counts = vec![0u64; n_items];
        for (items, w) in base {
            for i in items {
                counts[i.index()] += w;
            }
        }
        let flist = flist_from_counts(&counts, minsup_abs);
        let mut tree = FpTree::empty(n_items, &flist, minsup_abs);
        let mut path = Vec::new();
        for (items, w) in base {
            tree.ordered_slots(items, &mut path);
            tree.insert(&path, *w);
        }
        tree
    }

    fn ordered_slots(&self, items: &[ItemId], out: &mut Vec<u32>) {
        out.clear();
        out.extend(
            items
                .iter()
                .filter_map(|i| self.slot_of.get(i.index()).copied())
                .filter(|&s| s != NONE),
        );
        out.sort_unstable();
    }

    fn insert(&mut self, slots: &[u32], weight: u64) {
        let mut cur = ROOT;
        for &slot in slots {
            let found = self.nodes[cur as usize]
                .children
                .iter()
                .copied()
                .find(|&c| self.nodes[c as usize].slot == slot);
            cur = match found {
                Some(c) => {
                    self.nodes[c as usize].count += weight;
                    c
                }
                None => {
                    let id = self.nodes.len() as u32;
                    self.nodes.push(Node {
                        slot,
                        count: weight,
                        parent: cur,
                        children: Vec::new(),
                        next: NONE,
                    });
                    self.nodes[cur as usize].children.push(id);
                    let h = &mut self.header[slot as usize];
                    if h.tail == NONE {
                        h.head = id;
                    } else {
                        self.nodes[h.tail as usize].next = id;
                    }
                    h.tail = id;
                    id
                }
            };
        }
    }

    pub fn minsup_abs(&self) -> u64 {
        self.minsup_abs
    }

    pub fn header(&self) -> &[HeaderEntry] {
        &self.header
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Number of item nodes (root excluded).
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Sum of counts along an item's node-link chain.
    pub fn chain_count(&self, item: ItemId) -> u64 {
        match self.slot_of.get(item.index()).copied() {
            Some(s) if s != NONE => self.chain(s).map(|n| self.nodes[n as usize].count).sum(),
            _ => 0,
        }
    }

    fn chain(&self, slot: u32) -> impl Iterator<Item = u32> + '_ {
        let mut cur = self.header[slot as usize].head;
        std::iter::from_fn(move || {
            if cur == NONE {
                None
            } else {
                let n = cur;
                cur = self.nodes[n as usize].next;
                Some(n)
            }
        })
    }

    /// Root-to-leaf paths as `(items, leaf count)`.
    pub fn paths(&self) -> Vec<(Vec<ItemId>, u64)> {
        let mut out = Vec::new();
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            if n.children.is_empty() {
                let mut items = self.prefix_items(i as u32);
                items.push(self.header[n.slot as usize].item);
                out.push((items, n.count));
            }
        }
        out
    }

    /// Checks structural invariants; returns a description of the first
    /// violation. Used by tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            if n.count == 0 {
                return Err(format!("node {i} has zero count"));
            }
            let parent = &self.nodes[n.parent as usize];
            if n.parent != ROOT && parent.slot >= n.slot {
                return Err(format!("node {i} breaks F-list order along its path"));
            }
        }
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            let child_sum: u64 = n.children.iter().map(|&c| self.nodes[c as usize].count).sum();
            if child_sum > n.count {
                return Err(format!("children of node {i} sum to {child_sum} > {}", n.count));
            }
        }
        for (s, h) in self.header.iter().enumerate() {
            let sum: u64 = self.chain(s as u32).map(|n| self.nodes[n as usize].count).sum();
            if sum != h.total {
                return Err(format!("chain of item {} sums to {sum}, header says {}", h.item, h.total));
            }
        }
        Ok(())
    }

    /// Items on the path from the root down to (excluding) `node`, in F-list
    /// order.
    fn prefix_items(&self, node: u32) -> Vec<ItemId> {
        let mut items = Vec::new();
        let mut p = self.nodes[node as usize].parent;
        while p != ROOT && p != NONE {
            items.push(self.header[self.nodes[p as usize].slot as usize].item);
            p = self.nodes[p as usize].parent;
        }
        items.reverse();
        items
    }

    /// Conditional pattern base of the item in `slot`.
    fn pattern_base(&self, slot: u32) -> Vec<(Vec<ItemId>, u64)> {
        self.chain(slot)
            .filter_map(|n| {
                let items = self.prefix_items(n);
                (!items.is_empty()).then(|| (items, self.nodes[n as usize].count))
            })
            .collect()
    }

    /// The node sequence if the tree is one path, else `None`.
    fn single_path(&self) -> Option<Vec<u32>> {
        let mut path = Vec::new();
        let mut cur = ROOT;
        loop {
            match self.nodes[cur as usize].children.as_slice() {
                [] => return Some(path),
                [only] => {
                    path.push(*only);
                    cur = *only;
                }
                _ => return None,
            }
        }
    }

    /// Every frequent itemset with its exact support, in canonical order.
    pub fn mine(&self) -> Vec<FrequentItemset> {
        let mut out = Vec::new();
        let mut suffix = Vec::new();
        mine_tree(self, &mut suffix, &mut out);
        finish(out)
    }

    /// As [`FpTree::mine`], splitting the top-level suffix items across the
    /// rayon pool. Output is identical.
    pub fn mine_parallel(&self) -> Vec<FrequentItemset> {
        if let Some(path) = self.single_path() {
            let mut out = Vec::new();
            enumerate_path(self, &path, &[], &mut out);
            return finish(out);
        }
        let out: Vec<FrequentItemset> = (0..self.header.len() as u32)
            .into_par_iter()
            .flat_map_iter(|slot| {
                let mut out = Vec::new();
                let mut suffix = Vec::new();
                grow_slot(self, slot, &mut suffix, &mut out);
                out
            })
            .collect();
        finish(out)
    }
}

fn finish(mut out: Vec<FrequentItemset>) -> Vec<FrequentItemset> {
    sort_canonical(&mut out);
    out
}

fn mine_tree(tree: &FpTree, suffix: &mut Vec<ItemId>, out: &mut Vec<FrequentItemset>) {
    if let Some(path) = tree.single_path() {
        enumerate_path(tree, &path, suffix, out);
        return;
    }
    for slot in (0..tree.header.len() as u32).rev() {
        grow_slot(tree, slot, suffix, out);
    }
}

/// Emits `suffix + item(slot)` and recurses into its conditional tree.
fn grow_slot(tree: &FpTree, slot: u32, suffix: &mut Vec<ItemId>, out: &mut Vec<FrequentItemset>) {
    let entry = &tree.header[slot as usize];
    suffix.push(entry.item);
    out.push(FrequentItemset::new(Itemset::new(suffix.clone()), entry.total));
    let base = tree.pattern_base(slot);
    if !base.is_empty() {
        let cond = FpTree::from_weighted(tree.slot_of.len(), &base, tree.minsup_abs);
        if !cond.is_empty() {
            mine_tree(&cond, suffix, out);
        }
    }
    suffix.pop();
}

/// All non-empty node combinations of a single path, each joined with
/// `suffix`. Counts never increase going down a path, so a combination's
/// support is the count of its deepest node.
fn enumerate_path(tree: &FpTree, path: &[u32], suffix: &[ItemId], out: &mut Vec<FrequentItemset>) {
    let k = path.len();
    assert!(k < 64, "single path of {k} items is too long to enumerate");
    for mask in 1u64..(1u64 << k) {
        let deepest = 63 - mask.leading_zeros() as usize;
        let support = tree.nodes[path[deepest] as usize].count;
        let mut items: Vec<ItemId> = suffix.to_vec();
        items.extend(
            (0..k)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| tree.header[tree.nodes[path[b] as usize].slot as usize].item),
        );
        out.push(FrequentItemset::new(Itemset::new(items), support));
    }
}

/// Mines `db` at relative threshold `minsup_rel` (both scans plus growth).
pub fn mine(db: &TransactionDb, minsup_rel: f64) -> Vec<FrequentItemset> {
    let flist = build_flist(db, minsup_rel);
    FpTree::build(db, &flist).mine()
}

/// Mines `db` at an absolute threshold.
pub fn mine_abs(db: &TransactionDb, minsup_abs: u64) -> Vec<FrequentItemset> {
    let flist = build_flist_abs(db, minsup_abs);
    FpTree::build(db, &flist).mine()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ItemCatalog, ItemClass, Transaction};

    fn db(rows: &[&[&str]]) -> TransactionDb {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        TransactionDb::from_labels(&rows).unwrap()
    }

    fn named(db: &TransactionDb, found: &[FrequentItemset]) -> Vec<(Vec<String>, u64)> {
        found
            .iter()
            .map(|f| {
                let mut l: Vec<String> = db.catalog().labels_of(&f.itemset).map(str::to_string).collect();
                l.sort();
                (l, f.support)
            })
            .collect()
    }

    fn table1() -> TransactionDb {
        db(&[
            &["LARDEC", "PICABI", "PINCEM", "PINSYL"],
            &["ALNINC", "FRAEXC"],
            &["BETPEN", "PICABI", "POPTRE"],
        ])
    }

    #[test]
    fn flist_table1() {
        let d = table1();
        let f = build_flist(&d, 0.5);
        assert_eq!(f.minsup_abs, 2);
        assert_eq!(f.items, vec![(d.catalog().id_of("PICABI").unwrap(), 2)]);
    }

    #[test]
    fn flist_universal_item_only() {
        let d = db(&[&["A", "B"], &["A"], &["A", "C"]]);
        let f = build_flist(&d, 1.0);
        assert_eq!(f.items, vec![(ItemId(0), 3)]);
    }

    #[test]
    fn flist_ties_break_on_id() {
        let d = db(&[&["B", "A"], &["A", "B"], &["C"]]);
        let f = build_flist(&d, 0.5);
        // B interned first -> id 0
        assert_eq!(f.items, vec![(ItemId(0), 2), (ItemId(1), 2)]);
    }

    #[test]
    fn flist_empty_db() {
        let d = TransactionDb::new(ItemCatalog::new(), vec![]).unwrap();
        assert!(build_flist(&d, 0.5).is_empty());
        assert!(mine(&d, 0.5).is_empty());
    }

    #[test]
    fn tree_shares_identical_prefixes() {
        let d = db(&[&["A", "B"], &["A", "B"]]);
        let t = FpTree::build(&d, &build_flist_abs(&d, 1));
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.paths(), vec![(vec![ItemId(0), ItemId(1)], 2)]);
        assert_eq!(t.chain_count(ItemId(1)), 2);
        t.check_invariants().unwrap();
    }

    #[test]
    fn tree_branches() {
        let d = db(&[&["A", "B"], &["A", "C"]]);
        let t = FpTree::build(&d, &build_flist_abs(&d, 1));
        // root -> A(2) -> {B(1), C(1)}
        assert_eq!(t.node_count(), 3);
        let a = &t.nodes[1];
        assert_eq!((t.header[a.slot as usize].item, a.count), (ItemId(0), 2));
        let kids: Vec<(ItemId, u64)> = a
            .children
            .iter()
            .map(|&c| (t.header[t.nodes[c as usize].slot as usize].item, t.nodes[c as usize].count))
            .collect();
        assert_eq!(kids, vec![(ItemId(1), 1), (ItemId(2), 1)]);
        t.check_invariants().unwrap();
    }

    #[test]
    fn tree_table1_single_node() {
        let d = table1();
        let t = FpTree::build(&d, &build_flist(&d, 0.5));
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.paths(), vec![(vec![d.catalog().id_of("PICABI").unwrap()], 2)]);
    }

    #[test]
    fn mine_empty_tree() {
        let d = db(&[&["A"], &["B"]]);
        let t = FpTree::build(&d, &build_flist_abs(&d, 2));
        assert!(t.is_empty());
        assert!(t.mine().is_empty());
    }

    #[test]
    fn mine_small_db() {
        let d = db(&[&["A", "B"], &["A", "B"], &["A"]]);
        let got = named(&d, &mine_abs(&d, 2));
        let want = vec![
            (vec!["A".to_string()], 3),
            (vec!["B".to_string()], 2),
            (vec!["A".to_string(), "B".to_string()], 2),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn mine_table1() {
        let d = table1();
        assert_eq!(named(&d, &mine(&d, 0.5)), vec![(vec!["PICABI".to_string()], 2)]);
    }

    #[test]
    fn mine_multi_branch() {
        // supports by hand: a5 b4 c4 d2; ab3 ac3 bc3 ad2; abc2; cd1, bd1
        let d = db(&[
            &["a", "b", "c"],
            &["a", "b", "c"],
            &["a", "b"],
            &["a", "c", "d"],
            &["a", "d"],
            &["b", "c"],
        ]);
        let got = named(&d, &mine_abs(&d, 2));
        let s = |v: &[&str], n| (v.iter().map(|x| x.to_string()).collect::<Vec<_>>(), n);
        let mut want = vec![
            s(&["a"], 5),
            s(&["b"], 4),
            s(&["c"], 4),
            s(&["d"], 2),
            s(&["a", "b"], 3),
            s(&["a", "c"], 3),
            s(&["b", "c"], 3),
            s(&["a", "d"], 2),
            s(&["a", "b", "c"], 2),
        ];
        let mut got_sorted = got.clone();
        got_sorted.sort();
        want.sort();
        assert_eq!(got_sorted, want);
    }

    #[test]
    fn parallel_matches_serial() {
        let mut cat = ItemCatalog::new();
        let ids: Vec<ItemId> = (0..8).map(|i| cat.intern(&format!("i{i}"), ItemClass::Species).unwrap()).collect();
        let txs = (0..40)
            .map(|t| Transaction::new(t.to_string(), ids.iter().copied().filter(|i| (t * 7 + i.0 as usize * 3) % 5 < 3)))
            .collect();
        let d = TransactionDb::new(cat, txs).unwrap();
        let flist = build_flist_abs(&d, 4);
        let tree = FpTree::build(&d, &flist);
        tree.check_invariants().unwrap();
        assert_eq!(tree.mine(), tree.mine_parallel());
    }
}
