use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exactnum::{format_rational, Integer, Rational};
use crate::family::{build, FamilyCurve, FamilyError};
use crate::localred::{GlobalTamagawa, LocalData, Reduction};

pub const SCHEMA_VERSION: u32 = 1;

/// An integer that serializes as a JSON number when `|n| ≤ 2⁵³` and as a
/// decimal string otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Num(i64),
    Str(String),
}

const EXACT_F64: i64 = 1 << 53;

impl JsonInt {
    pub fn value(&self) -> Option<Integer> {
        match self {
            JsonInt::Num(n) => Some(Integer::from(*n)),
            JsonInt::Str(s) => s.parse().ok(),
        }
    }
}

impl From<&Integer> for JsonInt {
    fn from(n: &Integer) -> Self {
        match n.to_i64() {
            Some(v) if v.abs() <= EXACT_F64 => JsonInt::Num(v),
            _ => JsonInt::Str(n.to_string()),
        }
    }
}

impl fmt::Display for JsonInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JsonInt::Num(n) => write!(f, "{n}"),
            JsonInt::Str(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRecord {
    pub p: JsonInt,
    /// `"canonical"` / `"conjugate"` for split primes, null otherwise.
    pub branch: Option<String>,
    pub kind: String,
    pub kodaira: String,
    pub v_delta: i64,
    /// Split/nonsplit for multiplicative reduction, null otherwise.
    pub split: Option<bool>,
    pub c: u32,
}

impl From<&LocalData> for LocalRecord {
    fn from(l: &LocalData) -> Self {
        LocalRecord {
            p: JsonInt::from(l.prime.p()),
            branch: l.prime.branch().map(|b| b.as_str().to_string()),
            kind: l.prime.kind().as_str().to_string(),
            kodaira: l.kodaira.to_string(),
            v_delta: l.v_delta_min,
            split: match l.reduction {
                Reduction::SplitMult => Some(true),
                Reduction::NonsplitMult => Some(false),
                _ => None,
            },
            c: l.c,
        }
    }
}

pub const FLAG_OK: &str = "ok";
pub const FLAG_DEGENERATE: &str = "degenerate";
pub const FLAG_RATIONAL_POINT: &str = "rational-point";

/// One line of sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub schema_version: u32,
    pub t: String,
    pub d: Option<JsonInt>,
    pub disc: Option<JsonInt>,
    pub j: Option<String>,
    #[serde(rename = "c_E")]
    pub c_e: Option<String>,
    pub v13: Option<u32>,
    pub locals: Vec<LocalRecord>,
    /// `ok`, `degenerate`, `rational-point` or `error:<message>`.
    pub flags: String,
    /// Wall-clock seconds; null unless requested, so that output stays
    /// byte-identical across runs.
    pub timing: Option<f64>,
}

impl SurveyRecord {
    pub fn is_ok(&self) -> bool {
        self.flags == FLAG_OK
    }

    pub fn is_error(&self) -> bool {
        self.flags.starts_with("error:")
    }

    fn bare(t: &Rational, flags: String) -> Self {
        SurveyRecord {
            schema_version: SCHEMA_VERSION,
            t: format_rational(t),
            d: None,
            disc: None,
            j: None,
            c_e: None,
            v13: None,
            locals: Vec::new(),
            flags,
            timing: None,
        }
    }

    /// Record for a parameter whose curve could not be built.
    pub fn from_family_error(t: &Rational, e: &FamilyError) -> Self {
        let flag = match e {
            FamilyError::DegenerateParameter(_) => FLAG_DEGENERATE.to_string(),
            FamilyError::RationalPoint(_) => FLAG_RATIONAL_POINT.to_string(),
            other => format!("error:{other}"),
        };
        Self::bare(t, flag)
    }

    pub fn from_error(t: &Rational, msg: impl fmt::Display) -> Self {
        Self::bare(t, format!("error:{msg}"))
    }

    /// Record for a computed curve. Locals keep the primes with `c > 1` and
    /// every prime above 2 and 13.
    pub fn from_curve(fc: &FamilyCurve, g: &GlobalTamagawa) -> Self {
        let j = fc
            .model
            .j_invariant()
            .ok()
            .and_then(|j| j.as_rational().map(format_rational));
        let locals = g
            .locals
            .iter()
            .filter(|l| {
                let p = l.prime.p();
                l.c > 1 || *p == Integer::from(2) || *p == Integer::from(13)
            })
            .map(LocalRecord::from)
            .collect();
        SurveyRecord {
            schema_version: SCHEMA_VERSION,
            t: format_rational(&fc.t),
            d: Some(JsonInt::from(fc.field.d())),
            disc: Some(JsonInt::from(fc.field.disc())),
            j,
            c_e: Some(g.c_e.to_string()),
            v13: Some(g.v13),
            locals,
            flags: FLAG_OK.to_string(),
            timing: None,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn parameter(&self) -> Option<Rational> {
        crate::exactnum::parse_rational(&self.t)
    }
}

/// Builds the curve and its record without any invariant checks.
pub fn quick_record(t: &Rational) -> SurveyRecord {
    match build(t) {
        Err(e) => SurveyRecord::from_family_error(t, &e),
        Ok(fc) => match crate::localred::tamagawa(&fc) {
            Ok(g) => SurveyRecord::from_curve(&fc, &g),
            Err(e) => SurveyRecord::from_error(t, e),
        },
    }
}
