//! JSON wire formats. Axes are 1-based on the wire to match generator names
//! (`x1`, `b1` move along axis 1); internally they are 0-based.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeEdge, LatticePoint};
use crate::metabelian::Flow;
use crate::steiner::{GroupSteinerInstance, SteinerInstance, TreeResult};
use crate::wreath::{AElement, GroupSpec, WreathElement};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub base: LatticePoint,
    pub axis: usize,
}

impl EdgeJson {
    pub fn from_edge(e: &LatticeEdge) -> Self {
        EdgeJson {
            base: e.base.clone(),
            axis: e.axis + 1,
        }
    }

    pub fn to_edge(&self) -> Result<LatticeEdge> {
        if self.axis == 0 || self.axis > self.base.dim() {
            return Err(Error::InvalidInstance(format!(
                "edge axis {} outside 1..={}",
                self.axis,
                self.base.dim()
            )));
        }
        Ok(LatticeEdge::new(self.base.clone(), self.axis - 1))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SteinerInstanceJson {
    pub terminals: Vec<LatticePoint>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GroupSteinerInstanceJson {
    pub groups: Vec<Vec<LatticePoint>>,
}

/// Either Steiner input shape, told apart by its key.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnySteinerJson {
    Terminals(SteinerInstanceJson),
    Groups(GroupSteinerInstanceJson),
}

impl SteinerInstanceJson {
    pub fn into_instance(self) -> Result<SteinerInstance> {
        SteinerInstance::new(self.terminals)
    }
}

impl GroupSteinerInstanceJson {
    pub fn into_instance(self) -> Result<GroupSteinerInstance> {
        GroupSteinerInstance::new(self.groups)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TreeJson {
    pub length: u64,
    pub edges: Vec<EdgeJson>,
}

impl TreeJson {
    pub fn from_tree(t: &TreeResult) -> Self {
        TreeJson {
            length: t.total_length,
            edges: t.edges.iter().map(EdgeJson::from_edge).collect(),
        }
    }

    pub fn to_tree(&self) -> Result<TreeResult> {
        let edges = self.edges.iter().map(EdgeJson::to_edge).collect::<Result<_>>()?;
        let t = TreeResult::from_edges(edges);
        if t.total_length != self.length {
            return Err(Error::InvalidInstance(format!(
                "length {} does not match {} distinct edges",
                self.length, t.total_length
            )));
        }
        Ok(t)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FlowEdgeJson {
    pub base: LatticePoint,
    pub axis: usize,
    pub value: i64,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FlowJson {
    pub rank: usize,
    pub endpoint: LatticePoint,
    pub edges: Vec<FlowEdgeJson>,
}

impl FlowJson {
    pub fn from_flow(f: &Flow) -> Self {
        FlowJson {
            rank: f.rank(),
            endpoint: f.endpoint().clone(),
            edges: f
                .values()
                .iter()
                .map(|(e, &value)| FlowEdgeJson {
                    base: e.base.clone(),
                    axis: e.axis + 1,
                    value,
                })
                .collect(),
        }
    }

    pub fn to_flow(&self) -> Result<Flow> {
        let values = self
            .edges
            .iter()
            .map(|e| {
                let edge = EdgeJson {
                    base: e.base.clone(),
                    axis: e.axis,
                }
                .to_edge()?;
                Ok((edge, e.value))
            })
            .collect::<Result<Vec<_>>>()?;
        Flow::new(self.rank, values, self.endpoint.clone())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LampJson {
    pub position: LatticePoint,
    /// Exponent of each lamp generator, in `a1, a2, …` order.
    pub value: Vec<i64>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WreathElementJson {
    pub support: Vec<LampJson>,
    pub cursor: LatticePoint,
}

impl WreathElementJson {
    pub fn from_element(g: &WreathElement) -> Self {
        WreathElementJson {
            support: g
                .support()
                .iter()
                .map(|(p, a)| LampJson {
                    position: p.clone(),
                    value: a.exponents().to_vec(),
                })
                .collect(),
            cursor: g.cursor().clone(),
        }
    }

    pub fn to_element(&self, spec: &GroupSpec) -> Result<WreathElement> {
        let mut support = BTreeMap::new();
        for lamp in &self.support {
            support.insert(lamp.position.clone(), AElement::new(lamp.value.clone(), spec)?);
        }
        WreathElement::new(support, self.cursor.clone(), spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metabelian::compute_flow;
    use crate::words::{parse_word, Alphabet};
    use crate::wreath::evaluate;

    #[test]
    fn flow_round_trip() {
        let w = parse_word("x1 x2 x1^-1 x2^-1", &Alphabet::metabelian(2)).unwrap();
        let f = compute_flow(&w, 2).unwrap();
        let json = serde_json::to_string(&FlowJson::from_flow(&f)).unwrap();
        assert_eq!(
            json,
            r#"{"rank":2,"endpoint":[0,0],"edges":[{"base":[0,0],"axis":1,"value":1},{"base":[0,0],"axis":2,"value":-1},{"base":[0,1],"axis":1,"value":-1},{"base":[1,0],"axis":2,"value":1}]}"#
        );
        let back: FlowJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_flow().unwrap(), f);
    }

    #[test]
    fn wreath_round_trip() {
        let spec: GroupSpec = "Z2 wr Z^2".parse().unwrap();
        let g = evaluate(&parse_word("b1 a1 b1^-1", &spec.alphabet()).unwrap(), &spec).unwrap();
        let json = serde_json::to_string(&WreathElementJson::from_element(&g)).unwrap();
        assert_eq!(json, r#"{"support":[{"position":[1,0],"value":[1]}],"cursor":[0,0]}"#);
        let back: WreathElementJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_element(&spec).unwrap(), g);
    }

    #[test]
    fn steiner_shapes() {
        let t: AnySteinerJson = serde_json::from_str(r#"{"terminals":[[0,0],[1,1]]}"#).unwrap();
        assert!(matches!(t, AnySteinerJson::Terminals(_)));
        let g: AnySteinerJson = serde_json::from_str(r#"{"groups":[[[0,0]],[[2,0],[2,1]]]}"#).unwrap();
        assert!(matches!(g, AnySteinerJson::Groups(_)));
    }

    #[test]
    fn bad_axis_and_length_are_rejected() {
        let bad = TreeJson {
            length: 1,
            edges: vec![EdgeJson {
                base: LatticePoint::from([0, 0]),
                axis: 3,
            }],
        };
        assert!(bad.to_tree().is_err());
        let wrong_len = TreeJson {
            length: 2,
            edges: vec![EdgeJson {
                base: LatticePoint::from([0, 0]),
                axis: 1,
            }],
        };
        assert!(wrong_len.to_tree().is_err());
    }
}
