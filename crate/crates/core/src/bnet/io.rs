// JSON form of a net:
//   {n, root, nodes: [{id, kind: "ite"|"square", param?, value?, parents?, cpt?: {h0, h1}}]}
// Tables are lists of rows over parent states (00, 01, 10, 11), each row
// [P(a=0), P(a=1)]. `states` and `prior` only appear when they differ from
// the defaults a compiled net always has.

use serde::{Deserialize, Serialize, Serializer};

use super::{BayesNet, BnNode, BnetError, Cpt, NodeKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnetJson {
    pub n: usize,
    pub root: usize,
    pub nodes: Vec<BnNodeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnNodeJson {
    pub id: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parents: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpt: Option<CptPairJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_row"
    )]
    pub prior: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptPairJson {
    #[serde(serialize_with = "table")]
    pub h0: Vec<Vec<f64>>,
    #[serde(serialize_with = "table")]
    pub h1: Vec<Vec<f64>>,
}

// 0 and 1 are written as integers so files stay readable.
fn number(p: f64) -> serde_json::Value {
    if p == 0.0 || p == 1.0 {
        serde_json::Value::from(p as u8)
    } else {
        serde_json::Value::from(p)
    }
}

fn table<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<Vec<serde_json::Value>> = rows
        .iter()
        .map(|row| row.iter().copied().map(number).collect())
        .collect();
    v.serialize(s)
}

fn opt_row<S: Serializer>(row: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
    row.as_ref()
        .map(|r| r.iter().copied().map(number).collect::<Vec<_>>())
        .serialize(s)
}

impl BayesNet {
    pub fn to_json(&self) -> BnetJson {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(id, node)| {
                let states = (node.states != 2).then_some(node.states);
                match &node.kind {
                    NodeKind::IfThenElse { param, cpt } => BnNodeJson {
                        id,
                        kind: "ite".into(),
                        param: Some(*param),
                        value: None,
                        parents: Some(node.parents.clone()),
                        cpt: Some(CptPairJson {
                            h0: cpt[0].rows().to_vec(),
                            h1: cpt[1].rows().to_vec(),
                        }),
                        states,
                        prior: None,
                    },
                    NodeKind::Square { value, prior } => {
                        let default = Cpt::point(usize::from(*value), node.states);
                        BnNodeJson {
                            id,
                            kind: "square".into(),
                            param: None,
                            value: Some(u8::from(*value)),
                            parents: (!node.parents.is_empty()).then(|| node.parents.clone()),
                            cpt: None,
                            states,
                            prior: (*prior != default).then(|| prior.rows()[0].clone()),
                        }
                    }
                }
            })
            .collect();
        BnetJson {
            n: self.n,
            root: self.root,
            nodes,
        }
    }

    /// Rebuilds a net from its JSON form. Ids must be `0..len` in order.
    /// Shape problems other than malformed tables are left to the validator.
    pub fn from_json(json: &BnetJson) -> Result<Self, BnetError> {
        let bad = |msg: String| BnetError::BadFormat(msg);
        let mut nodes = Vec::with_capacity(json.nodes.len());
        for (index, node) in json.nodes.iter().enumerate() {
            if node.id != index {
                return Err(bad(format!("node at position {index} has id {}", node.id)));
            }
            let states = node.states.unwrap_or(2);
            let parents = node.parents.clone().unwrap_or_default();
            let kind = match node.kind.as_str() {
                "ite" => {
                    let param = node
                        .param
                        .ok_or_else(|| bad(format!("ite node {index} has no param")))?;
                    let cpt = node
                        .cpt
                        .as_ref()
                        .ok_or_else(|| bad(format!("ite node {index} has no cpt")))?;
                    NodeKind::IfThenElse {
                        param,
                        cpt: [Cpt::new(cpt.h0.clone())?, Cpt::new(cpt.h1.clone())?],
                    }
                }
                "square" => {
                    let value = match node.value {
                        Some(0) => false,
                        Some(1) => true,
                        other => {
                            return Err(bad(format!("square node {index} has value {other:?}")))
                        }
                    };
                    let prior = match &node.prior {
                        Some(row) => Cpt::new(vec![row.clone()])?,
                        None => Cpt::point(usize::from(value), states.max(2)),
                    };
                    NodeKind::Square { value, prior }
                }
                other => return Err(bad(format!("node {index} has unknown kind {other:?}"))),
            };
            nodes.push(BnNode {
                kind,
                parents,
                states,
            });
        }
        Ok(BayesNet {
            n: json.n,
            root: json.root,
            nodes,
        })
    }

    pub fn to_json_string(&self) -> String {
        // serializing plain data into a String cannot fail
        serde_json::to_string_pretty(&self.to_json()).expect("net serializes") + "\n"
    }

    pub fn from_json_str(text: &str) -> Result<Self, BnetError> {
        let json: BnetJson =
            serde_json::from_str(text).map_err(|e| BnetError::BadFormat(e.to_string()))?;
        Self::from_json(&json)
    }
}
