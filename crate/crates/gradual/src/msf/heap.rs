//! Ordered set of cross edges keyed by true weight.

use std::collections::{BTreeSet, HashMap};

use ordered_float::OrderedFloat;

use crate::graph::{Edge, EdgeId};

/// Cross edges ordered by `(weight, id)`.
#[derive(Clone, Debug, Default)]
pub struct CrossEdgeHeap {
    set: BTreeSet<(OrderedFloat<f64>, EdgeId)>,
    weight: HashMap<EdgeId, f64>,
}

impl CrossEdgeHeap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: &Edge) -> bool {
        if self.weight.insert(e.id, e.w).is_some() {
            return false;
        }
        self.set.insert((OrderedFloat(e.w), e.id))
    }

    pub fn remove(&mut self, id: EdgeId) -> bool {
        match self.weight.remove(&id) {
            Some(w) => self.set.remove(&(OrderedFloat(w), id)),
            None => false,
        }
    }

    /// Lightest edge, ties broken by smaller id. `None` once the trees agree.
    pub fn min_weight_cross_edge(&self) -> Option<EdgeId> {
        self.set.first().map(|&(_, id)| id)
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.weight.contains_key(&id)
    }
    pub fn len(&self) -> usize {
        self.set.len()
    }
    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}
