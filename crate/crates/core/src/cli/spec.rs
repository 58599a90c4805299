//! JSON spec documents: family descriptor, named inputs, analysis options.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channels::{
    ab_povm_family, diagonal_measurement_family, make_cdep, make_custom, make_damp, make_diag, make_gp, make_gp_xi,
    make_measurement, make_ou, make_qubit_phase, make_unitary, ortho_rank1_family, weyl_rotated_family, ChannelFamily,
    MeasurementStructure, Povm, DEFAULT_TOL,
};
use crate::numerics::{max_entangled, CMatrix, SystemShape, C64};
use crate::optimal_inputs::PureState;

use super::CliError;

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];
/// Row-major matrix of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<Pair>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, InputSpec>,
    #[serde(default, skip_serializing_if = "Analysis::is_empty")]
    pub analysis: Analysis,
    #[serde(default, skip_serializing_if = "Outputs::is_empty")]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamMember {
    pub label: String,
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixMember {
    pub label: String,
    pub matrix: MatrixSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ListMember {
    pub label: String,
    pub matrices: Vec<MatrixSpec>,
}

/// Family descriptor, tagged by `kind`.
///
/// Parameter vectors: `gp` θ (length d²), `gp-xi` [ξ¹, ξ², ξ³], `damp` [p, ξ],
/// `diag` free entries, `cdep` [θ], `ou` weights of the later unitaries,
/// `qubit-phase` [θ¹, θ²]. `custom` members list Kraus operators and
/// `measurement` members list POVM elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Gp { d: usize, members: Vec<ParamMember> },
    GpXi { members: Vec<ParamMember> },
    Damp { members: Vec<ParamMember> },
    Diag { d: usize, members: Vec<ParamMember> },
    Cdep { d: usize, members: Vec<ParamMember> },
    Ou { unitaries: Vec<MatrixSpec>, members: Vec<ParamMember> },
    QubitPhase { members: Vec<ParamMember> },
    Unitary { members: Vec<MatrixMember> },
    Custom { members: Vec<ListMember> },
    Measurement { members: Vec<ListMember> },
    AbPovm { a: f64, b: f64 },
    OrthoRank1 { vectors: Vec<Vec<Pair>> },
    WeylRotated { e1: Vec<Pair>, alpha: Vec<f64>, beta: Vec<f64> },
    DiagonalMeasurement { a: Vec<f64> },
}

/// `"phi_d"`, `"basis i j"` or explicit amplitudes with factor dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputSpec {
    Named(String),
    Explicit { amplitudes: Vec<Pair>, dims: Vec<usize> },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    /// compare: input names.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub challenger: Option<String>,
    /// certify: group-correction | unital-qubit | measurement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    /// certify: target or certified input name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// unital-qubit: branch weights (p, 1−p) and rotation V.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<MatrixSpec>,
    /// sweep: inputs and (plus, minus) label pairs; all when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ang: Option<AngSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat: Option<RepeatSpec>,
}

impl Analysis {
    pub fn is_empty(&self) -> bool {
        *self == Analysis::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngSpec {
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_prime: Option<Vec<f64>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeatSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// identity | random-unitary | fresh-swap
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interleaver: Option<String>,
    /// dimension of H_Rⁿ for identity / random-unitary interleavers
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub register_dim: Option<usize>,
    /// adaptive search: block sizes, menu input names, prior of the first member
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub menu: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

impl Outputs {
    pub fn is_empty(&self) -> bool {
        *self == Outputs::default()
    }
}

pub const PRESETS: &[(&str, &str)] = &[
    ("damp-counterexample", include_str!("../../presets/damp_counterexample.json")),
    ("gp3-simplex", include_str!("../../presets/gp3_simplex.json")),
    ("diag2", include_str!("../../presets/diag2.json")),
    ("gp-xi-noncollinear", include_str!("../../presets/gp_xi_noncollinear.json")),
    ("unital-qubit", include_str!("../../presets/unital_qubit.json")),
    ("mes-rotate", include_str!("../../presets/mes_rotate.json")),
    ("ortho-measure", include_str!("../../presets/ortho_measure.json")),
    ("ang-square", include_str!("../../presets/ang_square.json")),
    ("repeat-gp", include_str!("../../presets/repeat_gp.json")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn parse(text: &str) -> Result<SpecDocument, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("spec: {}", e)))
}

fn complex(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn matrix(m: &MatrixSpec, at: &str) -> Result<CMatrix, CliError> {
    let rows: Vec<Vec<C64>> = m.iter().map(|r| r.iter().map(complex).collect()).collect();
    CMatrix::from_rows(&rows).map_err(|e| CliError::Parse(format!("{}: {}", at, e)))
}

fn vector(v: &[Pair]) -> Vec<C64> {
    v.iter().map(complex).collect()
}

fn fixed<const N: usize>(m: &ParamMember, at: &str) -> Result<[f64; N], CliError> {
    m.params.as_slice().try_into().map_err(|_| {
        CliError::Parse(format!("{}.params: expected {} values, got {}", at, N, m.params.len()))
    })
}

fn labelled(members: &[ParamMember]) -> Vec<(&str, Vec<f64>)> {
    members.iter().map(|m| (m.label.as_str(), m.params.clone())).collect()
}

impl FamilySpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FamilySpec::Gp { .. } => "gp",
            FamilySpec::GpXi { .. } => "gp-xi",
            FamilySpec::Damp { .. } => "damp",
            FamilySpec::Diag { .. } => "diag",
            FamilySpec::Cdep { .. } => "cdep",
            FamilySpec::Ou { .. } => "ou",
            FamilySpec::QubitPhase { .. } => "qubit-phase",
            FamilySpec::Unitary { .. } => "unitary",
            FamilySpec::Custom { .. } => "custom",
            FamilySpec::Measurement { .. } => "measurement",
            FamilySpec::AbPovm { .. } => "ab-povm",
            FamilySpec::OrthoRank1 { .. } => "ortho-rank1",
            FamilySpec::WeylRotated { .. } => "weyl-rotated",
            FamilySpec::DiagonalMeasurement { .. } => "diagonal-measurement",
        }
    }

    /// Builds the family; shape errors are parse errors, failed constraints are validation errors.
    pub fn build(&self) -> Result<ChannelFamily, CliError> {
        let v = CliError::Validation;
        let fam = match self {
            FamilySpec::Gp { d, members } => make_gp(*d, &labelled(members)),
            FamilySpec::GpXi { members } => {
                let ms = members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| Ok((m.label.as_str(), fixed::<3>(m, &format!("family.members[{}]", i))?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                make_gp_xi(&ms)
            }
            FamilySpec::Damp { members } => {
                let ms = members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let [p, xi] = fixed::<2>(m, &format!("family.members[{}]", i))?;
                        Ok((m.label.as_str(), p, xi))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                make_damp(&ms)
            }
            FamilySpec::Diag { d, members } => make_diag(*d, &labelled(members)),
            FamilySpec::Cdep { d, members } => {
                let ms = members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| Ok((m.label.as_str(), fixed::<1>(m, &format!("family.members[{}]", i))?[0])))
                    .collect::<Result<Vec<_>, CliError>>()?;
                make_cdep(*d, &ms)
            }
            FamilySpec::Ou { unitaries, members } => {
                let us = unitaries
                    .iter()
                    .enumerate()
                    .map(|(i, u)| matrix(u, &format!("family.unitaries[{}]", i)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                make_ou(&us, &labelled(members))
            }
            FamilySpec::QubitPhase { members } => {
                let ms = members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let [a, b] = fixed::<2>(m, &format!("family.members[{}]", i))?;
                        Ok((m.label.as_str(), a, b))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                make_qubit_phase(&ms)
            }
            FamilySpec::Unitary { members } => {
                let ms = members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| Ok((m.label.as_str(), matrix(&m.matrix, &format!("family.members[{}].matrix", i))?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                make_unitary(&ms)
            }
            FamilySpec::Custom { members } => make_custom(&list_members(members)?),
            FamilySpec::Measurement { members } => {
                let ms = list_members(members)?
                    .into_iter()
                    .map(|(l, els)| Ok((l, Povm::new(els, DEFAULT_TOL).map_err(|e| v(format!("{}: {}", l, e)))?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                make_measurement(&ms, MeasurementStructure::Unstructured)
            }
            FamilySpec::AbPovm { a, b } => ab_povm_family(*a, *b),
            FamilySpec::OrthoRank1 { vectors } => {
                ortho_rank1_family(&vectors.iter().map(|x| vector(x)).collect::<Vec<_>>())
            }
            FamilySpec::WeylRotated { e1, alpha, beta } => weyl_rotated_family(&vector(e1), alpha, beta),
            FamilySpec::DiagonalMeasurement { a } => diagonal_measurement_family(a),
        };
        fam.map_err(|e| v(format!("family ({}): {}", self.kind_name(), e)))
    }
}

fn list_members(members: &[ListMember]) -> Result<Vec<(&str, Vec<CMatrix>)>, CliError> {
    members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let ms = m
                .matrices
                .iter()
                .enumerate()
                .map(|(k, x)| matrix(x, &format!("family.members[{}].matrices[{}]", i, k)))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok((m.label.as_str(), ms))
        })
        .collect()
}

impl InputSpec {
    /// Resolves to a pure state on H_in ⊗ H_R for a family with input dimension `din`.
    pub fn build(&self, name: &str, din: usize) -> Result<PureState, CliError> {
        let bad = |msg: String| CliError::Parse(format!("inputs.{}: {}", name, msg));
        match self {
            InputSpec::Named(s) => {
                let words: Vec<&str> = s.split_whitespace().collect();
                match words.as_slice() {
                    [w] if w.starts_with("phi_") => {
                        let d: usize = w[4..].parse().map_err(|_| bad(format!("bad dimension in {:?}", s)))?;
                        if d != din {
                            return Err(bad(format!("{} does not match input dimension {}", w, din)));
                        }
                        Ok(PureState::phi(d))
                    }
                    ["basis", i, j] => {
                        let i: usize = i.parse().map_err(|_| bad(format!("bad index in {:?}", s)))?;
                        let j: usize = j.parse().map_err(|_| bad(format!("bad index in {:?}", s)))?;
                        PureState::basis_pair(din, din, i, j).map_err(|e| bad(e.to_string()))
                    }
                    _ => Err(bad(format!("unknown state {:?} (use \"phi_d\" or \"basis i j\")", s))),
                }
            }
            InputSpec::Explicit { amplitudes, dims } => {
                let shape = SystemShape::new(dims.clone()).map_err(|e| bad(e.to_string()))?;
                if dims.first() != Some(&din) {
                    return Err(bad(format!("first factor must have dimension {}", din)));
                }
                PureState::normalized(vector(amplitudes), shape).map_err(|e| bad(e.to_string()))
            }
        }
    }
}

impl SpecDocument {
    pub fn family(&self) -> Result<ChannelFamily, CliError> {
        self.family.as_ref().ok_or_else(|| CliError::Parse("spec has no family".into()))?.build()
    }

    pub fn input(&self, name: &str, din: usize) -> Result<PureState, CliError> {
        self.inputs
            .get(name)
            .ok_or_else(|| CliError::Parse(format!("no input named {:?}", name)))?
            .build(name, din)
    }

    pub fn all_inputs(&self, din: usize) -> Result<Vec<(String, PureState)>, CliError> {
        self.inputs.iter().map(|(k, v)| Ok((k.clone(), v.build(k, din)?))).collect()
    }
}

/// Φ_{dⁿ} on H_in^{⊗n} ⊗ H_R with dim H_R = dⁿ, the identical-use reference.
pub fn phi_block(d: usize, n: usize) -> PureState {
    let mut dims = vec![d; n];
    dims.push(d.pow(n as u32));
    PureState::new(max_entangled(d.pow(n as u32)), SystemShape::new(dims).expect("positive")).expect("unit")
}
