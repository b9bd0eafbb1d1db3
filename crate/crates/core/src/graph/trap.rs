use std::fmt::Debug;
use std::marker::PhantomData;

use serde::Serialize;

use super::{iso_eq, Graph};
use crate::error::Result;
use crate::perm::Permutation;
use crate::trapcore::Trap;

/// Graphs as a TRAP. The unitary flavour has `I` as unit; the solar flavour
/// is the free non-unitary TRAP and declares no unit.
#[derive(Clone, Debug)]
pub struct GraphTrap<D> {
    unitary: bool,
    _decoration: PhantomData<fn() -> D>,
}

impl<D> GraphTrap<D> {
    pub fn unitary() -> Self {
        Self {
            unitary: true,
            _decoration: PhantomData,
        }
    }

    pub fn solar() -> Self {
        Self {
            unitary: false,
            _decoration: PhantomData,
        }
    }
}

impl<D> Trap for GraphTrap<D>
where
    D: Clone + Debug + PartialEq + Serialize + Send + Sync,
{
    type Elem = Graph<D>;

    fn name(&self) -> String {
        if self.unitary { "graph" } else { "solar-graph" }.to_string()
    }

    fn arity(&self, p: &Graph<D>) -> (usize, usize) {
        p.arity()
    }

    fn act(&self, sigma: &Permutation, p: &Graph<D>, tau: &Permutation) -> Result<Graph<D>> {
        p.act(sigma, tau)
    }

    fn hconcat(&self, p: &Graph<D>, q: &Graph<D>) -> Result<Graph<D>> {
        Ok(p.hconcat(q))
    }

    fn partial_trace(&self, p: &Graph<D>, i: usize, j: usize) -> Result<Graph<D>> {
        p.partial_trace(i, j)
    }

    fn unit0(&self) -> Graph<D> {
        Graph::empty()
    }

    fn unit1(&self) -> Option<Graph<D>> {
        self.unitary.then(Graph::unit)
    }

    fn eq(&self, p: &Graph<D>, q: &Graph<D>) -> bool {
        iso_eq(p, q)
    }

    fn to_json(&self, p: &Graph<D>) -> serde_json::Value {
        crate::dsl::json::graph_to_value(p)
    }
}
