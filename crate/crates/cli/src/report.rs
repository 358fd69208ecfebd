//! Serialized forms of spectrum reports: JSON, CSV and a plain table.

use serde::{Deserialize, Serialize};
use toledo_core::divisor::StarCertificate;
use toledo_core::families::{Family, FamilyWitness};
use toledo_core::spectrum::{Bounds, DirectSign, GroupVariant, SpectrumReport};
use toledo_core::Rational;

const DECIMAL_PLACES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub signature: Vec<u64>,
    pub group: GroupVariant,
    pub values: Vec<ValueJson>,
    pub component_lower_bound: usize,
    pub margin_check: bool,
    pub margin_delta: i64,
    pub search_bounds: Vec<Bounds>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueJson {
    pub tau: Rational,
    /// Display only.
    pub tau_decimal: String,
    pub direct_sign: DirectSign,
    pub witness_count: u64,
    pub witnesses: Vec<WitnessJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub family: Family,
    pub a: Option<String>,
    pub b: Option<String>,
    pub star: Option<StarCertificate>,
}

fn witness_json(w: &FamilyWitness, star: &Option<StarCertificate>) -> WitnessJson {
    let (a, b) = match w {
        FamilyWitness::StableTernary { a, b } | FamilyWitness::StableBinary { a, b } => {
            (Some(a.to_literal()), Some(b.to_literal()))
        }
        FamilyWitness::ReducibleTernary { b } => (None, Some(b.to_literal())),
        FamilyWitness::Trivial { .. } => (None, None),
    };
    WitnessJson {
        family: w.family(),
        a,
        b,
        star: star.clone(),
    }
}

impl ReportJson {
    pub fn from_report(r: &SpectrumReport) -> Self {
        ReportJson {
            signature: r.sig.multiplicities().to_vec(),
            group: r.group_variant,
            values: r
                .values
                .iter()
                .map(|v| ValueJson {
                    tau: v.value.clone(),
                    tau_decimal: v.value.to_decimal(DECIMAL_PLACES),
                    direct_sign: v.direct_sign,
                    witness_count: v.witness_count,
                    witnesses: v.witnesses.iter().map(|w| witness_json(&w.witness, &w.star)).collect(),
                })
                .collect(),
            component_lower_bound: r.component_lower_bound,
            margin_check: r.margin_check_passed,
            margin_delta: r.margin_delta,
            search_bounds: r.search_bounds_used.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["tau", "family", "a", "b", "star_y", "star_yres", "star_s"])
            .expect("in-memory write");
        for v in &self.values {
            for wit in &v.witnesses {
                let (y, yres, s) = match &wit.star {
                    Some(c) => (c.y.to_string(), join(&c.y_res), join(&c.s)),
                    None => Default::default(),
                };
                let tau = v.tau.to_string();
                w.write_record([
                    tau.as_str(),
                    wit.family.label(),
                    wit.a.as_deref().unwrap_or(""),
                    wit.b.as_deref().unwrap_or(""),
                    &y,
                    &yres,
                    &s,
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_table(&self) -> String {
        let sig: Vec<String> = self.signature.iter().map(u64::to_string).collect();
        let mut out = format!(
            "signature {}  group {}  margin check (delta {}): {}\n",
            sig.join(","),
            serde_json::to_value(self.group).expect("group").as_str().unwrap_or_default(),
            self.margin_delta,
            if self.margin_check { "passed" } else { "FAILED" },
        );
        out.push_str(&format!("component lower bound: {}\n", self.component_lower_bound));
        out.push_str(&format!(
            "{:<16} {:>12} {:>5} {:>10}  {}\n",
            "tau", "decimal", "sign", "witnesses", "families"
        ));
        for v in &self.values {
            let mut fams: Vec<&str> = v.witnesses.iter().map(|w| w.family.label()).collect();
            fams.dedup();
            let sign = match v.direct_sign {
                DirectSign::Plus => "+",
                DirectSign::Minus => "-",
                DirectSign::Both => "both",
            };
            out.push_str(&format!(
                "{:<16} {:>12} {:>5} {:>10}  {}\n",
                v.tau.to_string(),
                v.tau_decimal,
                sign,
                v.witness_count,
                fams.join(",")
            ));
        }
        out
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// The exact values listed in a table rendering, in row order.
pub fn table_values(table: &str) -> Vec<Rational> {
    table
        .lines()
        .skip(3)
        .filter_map(|l| l.split_whitespace().next())
        .filter_map(|t| t.parse().ok())
        .collect()
}
