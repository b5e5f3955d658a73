//! Affine charts of blow-ups at coordinate centers, the four transform
//! flavors, exceptional-divisor bookkeeping and the locus of maximal order.

use std::fmt;

use crate::error::CoreError;
use crate::gfpoly::{monomial_content, order_at_origin, Monomial, Polynomial};
use crate::text::Ring;

/// An exceptional divisor `V(x_var)` created by a blow-up.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExceptionalRecord {
    pub var: usize,
    /// 1-based index of the blow-up that created the divisor.
    pub birth: usize,
}

impl ExceptionalRecord {
    pub fn label(&self) -> String {
        format!("E_{}", self.birth)
    }
}

/// Which power of the new exceptional variable is divided out of the total transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Total,
    Weak,
    Strict,
    Controlled(u64),
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformKind::Total => f.write_str("total"),
            TransformKind::Weak => f.write_str("weak"),
            TransformKind::Strict => f.write_str("strict"),
            TransformKind::Controlled(c) => write!(f, "controlled {c}"),
        }
    }
}

/// A coordinate center `V(x_i : i ∈ center)` and the chart `x_chart ≠ 0` of its blow-up.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlowupSpec {
    pub center: Vec<usize>,
    pub chart: usize,
}

impl BlowupSpec {
    pub fn new(mut center: Vec<usize>, chart: usize) -> Result<Self, CoreError> {
        center.sort_unstable();
        center.dedup();
        if center.len() < 2 {
            return Err(CoreError::InvalidCenter(
                "a center needs at least two coordinates".into(),
            ));
        }
        if !center.contains(&chart) {
            return Err(CoreError::InvalidCenter(
                "the chart variable must belong to the center".into(),
            ));
        }
        Ok(BlowupSpec { center, chart })
    }

    /// The point blow-up at the origin of an `n`-dimensional chart.
    pub fn point(nvars: usize, chart: usize) -> Self {
        BlowupSpec {
            center: (0..nvars).collect(),
            chart,
        }
    }
}

/// One recorded step of a chart's history.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HistoryEntry {
    Blowup {
        spec: BlowupSpec,
        kind: TransformKind,
    },
    /// `x_var ↦ x_var + c`.
    Translate { var: usize, c: u64 },
    /// A hypersurface override for flag level `level` (1-based); does not change the ideal.
    Hypersurface { level: usize, poly: Polynomial },
}

impl HistoryEntry {
    /// The script statement that reproduces this entry.
    pub fn to_statement(&self, ring: &Ring) -> String {
        match self {
            HistoryEntry::Blowup { spec, kind } => {
                let center: Vec<&str> = spec.center.iter().map(|&i| ring.var_name(i)).collect();
                let mut s = format!(
                    "blowup ({}) chart {}",
                    center.join(","),
                    ring.var_name(spec.chart)
                );
                if *kind != TransformKind::Weak {
                    s.push_str(&format!(" {kind}"));
                }
                s.push(';');
                s
            }
            HistoryEntry::Translate { var, c } => {
                format!(
                    "translate {} {};",
                    ring.var_name(*var),
                    ring.field.signed(*c)
                )
            }
            HistoryEntry::Hypersurface { level, poly } => {
                format!("hypersurface {level} {};", ring.show(poly))
            }
        }
    }
}

/// An affine chart: ring, current ideal, live exceptional divisors and history.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChartState {
    ring: Ring,
    initial: Vec<Polynomial>,
    ideal: Vec<Polynomial>,
    exceptionals: Vec<ExceptionalRecord>,
    history: Vec<HistoryEntry>,
    blowups: usize,
}

/// A failed center check with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterViolation {
    pub message: String,
    /// Generator index and Hasse multi-index whose derivative does not vanish on the center.
    pub witness: Option<(usize, Vec<u32>)>,
}

impl fmt::Display for CenterViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)?;
        if let Some((g, alpha)) = &self.witness {
            write!(
                f,
                " (witness: Hasse derivative {alpha:?} of generator {})",
                g + 1
            )?;
        }
        Ok(())
    }
}

impl ChartState {
    pub fn new(ring: Ring, ideal: Vec<Polynomial>) -> Self {
        let ideal: Vec<Polynomial> = ideal.into_iter().filter(|g| !g.is_zero()).collect();
        ChartState {
            ring,
            initial: ideal.clone(),
            ideal,
            exceptionals: Vec::new(),
            history: Vec::new(),
            blowups: 0,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn ideal(&self) -> &[Polynomial] {
        &self.ideal
    }

    pub fn initial_ideal(&self) -> &[Polynomial] {
        &self.initial
    }

    pub fn exceptionals(&self) -> &[ExceptionalRecord] {
        &self.exceptionals
    }

    pub fn exceptional_vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.exceptionals.iter().map(|e| e.var).collect();
        v.sort_unstable();
        v
    }

    pub fn is_exceptional(&self, var: usize) -> bool {
        self.exceptionals.iter().any(|e| e.var == var)
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn blowup_count(&self) -> usize {
        self.blowups
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    /// Order of the ideal at the origin of the chart.
    pub fn order(&self) -> Result<u64, CoreError> {
        order_at_origin(&self.ideal)
    }

    /// Checks that a coordinate center lies in the locus of maximal order.
    ///
    /// For a coordinate subspace the order of a generator along it is the
    /// minimal degree of its terms in the center variables, so a term of
    /// center-degree below the order yields the witness derivative directly.
    pub fn validate_center(&self, center: &[usize]) -> Result<(), CenterViolation> {
        if let Some(&bad) = center.iter().find(|&&i| i >= self.nvars()) {
            return Err(CenterViolation {
                message: format!("variable index {bad} is not a chart variable"),
                witness: None,
            });
        }
        let c = match self.order() {
            Ok(c) => c,
            Err(_) => {
                return Err(CenterViolation {
                    message: "the ideal is zero".into(),
                    witness: None,
                })
            }
        };
        if c == 0 {
            return Err(CenterViolation {
                message: "the origin is not on the variety (order 0)".into(),
                witness: None,
            });
        }
        for (gi, g) in self.ideal.iter().enumerate() {
            for (m, _) in g.terms() {
                let dc: u64 = center.iter().map(|&i| m.exp(i) as u64).sum();
                if dc < c {
                    let mut alpha = vec![0u32; self.nvars()];
                    for &i in center {
                        alpha[i] = m.exp(i);
                    }
                    let names: Vec<&str> = center.iter().map(|&i| self.ring.var_name(i)).collect();
                    return Err(CenterViolation {
                        message: format!(
                            "order along V({}) is {dc} < maximal order {c}",
                            names.join(",")
                        ),
                        witness: Some((gi, alpha)),
                    });
                }
            }
        }
        // Coordinate centers and coordinate exceptional divisors always cross normally.
        Ok(())
    }

    /// Blows up the center and passes to the chart `x_chart ≠ 0`.
    pub fn blowup(&self, spec: &BlowupSpec, kind: TransformKind) -> Result<ChartState, CoreError> {
        self.validate_center(&spec.center)
            .map_err(|v| CoreError::InvalidCenter(v.to_string()))?;
        let t = spec.chart;
        let total: Vec<Polynomial> = self
            .ideal
            .iter()
            .map(|g| g.monomial_substitute(&spec.center, t))
            .collect();
        let max_power = total
            .iter()
            .map(|g| g.valuation_in(t) as u64)
            .min()
            .unwrap_or(0);
        let d = match kind {
            TransformKind::Total => 0,
            TransformKind::Weak => self.order()?,
            TransformKind::Strict => {
                if self.ideal.len() != 1 {
                    return Err(CoreError::NotPrincipal(self.ideal.len()));
                }
                max_power
            }
            TransformKind::Controlled(c) => {
                if c > max_power {
                    return Err(CoreError::ControlledTooLarge { c, max: max_power });
                }
                c
            }
        };
        let mut div = Monomial::one();
        div.set_exp(t, u32::try_from(d).expect("exponent overflow"));
        let ideal = total.iter().map(|g| g.div_monomial(&div)).collect();

        let blowups = self.blowups + 1;
        let mut exceptionals: Vec<ExceptionalRecord> = self
            .exceptionals
            .iter()
            .filter(|e| e.var != t)
            .cloned()
            .collect();
        exceptionals.push(ExceptionalRecord {
            var: t,
            birth: blowups,
        });
        let mut history = self.history.clone();
        history.push(HistoryEntry::Blowup {
            spec: spec.clone(),
            kind,
        });
        Ok(ChartState {
            ring: self.ring.clone(),
            initial: self.initial.clone(),
            ideal,
            exceptionals,
            history,
            blowups,
        })
    }

    /// Replaces `x_var` by `x_var + c`; an exceptional divisor through the old
    /// origin no longer passes through the new one when `c ≠ 0`.
    pub fn translate(&self, var: usize, c: i64) -> ChartState {
        let c = self.ring.field.reduce(c);
        let ideal = self.ideal.iter().map(|g| g.translate(var, c)).collect();
        let exceptionals = if c == 0 {
            self.exceptionals.clone()
        } else {
            self.exceptionals
                .iter()
                .filter(|e| e.var != var)
                .cloned()
                .collect()
        };
        let mut history = self.history.clone();
        history.push(HistoryEntry::Translate { var, c });
        ChartState {
            ring: self.ring.clone(),
            initial: self.initial.clone(),
            ideal,
            exceptionals,
            history,
            blowups: self.blowups,
        }
    }

    /// Records a hypersurface override; the ideal is unchanged.
    pub fn with_hypersurface(&self, level: usize, poly: Polynomial) -> ChartState {
        let mut s = self.clone();
        s.history.push(HistoryEntry::Hypersurface { level, poly });
        s
    }

    /// Exponent of each live exceptional variable in the monomial content of `gens`.
    pub fn exceptional_multiplicities(&self, gens: &[Polynomial]) -> Vec<u32> {
        let vars: Vec<usize> = self.exceptionals.iter().map(|e| e.var).collect();
        let (m, _) = monomial_content(gens, &vars);
        self.exceptionals.iter().map(|e| m.exp(e.var)).collect()
    }

    /// Rebuilds a state by replaying a history from an initial ideal.
    pub fn replay(
        ring: Ring,
        initial: Vec<Polynomial>,
        history: &[HistoryEntry],
    ) -> Result<ChartState, CoreError> {
        let mut s = ChartState::new(ring, initial);
        for h in history {
            s = match h {
                HistoryEntry::Blowup { spec, kind } => s.blowup(spec, *kind)?,
                HistoryEntry::Translate { var, c } => s.translate(*var, *c as i64),
                HistoryEntry::Hypersurface { level, poly } => {
                    s.with_hypersurface(*level, poly.clone())
                }
            };
        }
        Ok(s)
    }

    /// A runnable script reproducing this state.
    pub fn export_script(&self) -> String {
        let mut out = format!("ring {} {};\n", self.ring.p(), self.ring.names.join(","));
        let gens: Vec<String> = self.initial.iter().map(|g| self.ring.show(g)).collect();
        out.push_str(&format!("ideal {};\n", gens.join(", ")));
        for h in &self.history {
            out.push_str(&h.to_statement(&self.ring));
            out.push('\n');
        }
        out
    }
}

/// All Hasse derivatives `D^α g` with `|α| < c`; their common zero set is `{x : ord_x ≥ c}`.
pub fn max_order_locus_ideal(gens: &[Polynomial], c: u64) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = Vec::new();
    for g in gens {
        let n = g.nvars();
        let bounds: Vec<u32> = (0..n).map(|i| g.degree_in(i)).collect();
        let mut alpha = vec![0u32; n];
        enumerate_multi_indices(&bounds, c, 0, 0, &mut alpha, &mut |a| {
            let d = g.hasse_derivative(a);
            if !d.is_zero() && !out.contains(&d) {
                out.push(d);
            }
        });
    }
    out
}

fn enumerate_multi_indices(
    bounds: &[u32],
    limit: u64,
    pos: usize,
    used: u64,
    alpha: &mut Vec<u32>,
    visit: &mut dyn FnMut(&[u32]),
) {
    if pos == bounds.len() {
        visit(alpha);
        return;
    }
    let mut a = 0u32;
    while a <= bounds[pos] && used + (a as u64) < limit {
        alpha[pos] = a;
        enumerate_multi_indices(bounds, limit, pos + 1, used + a as u64, alpha, visit);
        a += 1;
    }
    alpha[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring3() -> Ring {
        Ring::new(3, &["x", "y", "z", "w"]).unwrap()
    }

    #[test]
    fn example_one_strict_transforms() {
        let r = ring3();
        let s = ChartState::new(r.clone(), vec![r.poly("x^3+z^13-z*w^18")]);
        let s1 = s
            .blowup(&BlowupSpec::point(4, 3), TransformKind::Strict)
            .unwrap();
        assert_eq!(r.show(&s1.ideal()[0]), "x^3+z^13*w^10-z*w^16");
        let s2 = s1
            .blowup(&BlowupSpec::point(4, 2), TransformKind::Strict)
            .unwrap();
        assert_eq!(s2.ideal()[0], r.poly("x^3+z^14*w^10*(z^6-w^6)"));
        assert_eq!(s2.exceptional_vars(), vec![2, 3]);
        assert_eq!(s2.exceptionals()[1].label(), "E_2");
    }

    #[test]
    fn rejects_center_outside_max_order_locus() {
        let r = Ring::new(2, &["x", "y", "z", "w"]).unwrap();
        let s = ChartState::new(r.clone(), vec![r.poly("x^2+w^3+y^25+y*z^16")]);
        assert!(s.validate_center(&[0, 1, 2, 3]).is_ok());
        let v = s.validate_center(&[0, 1]).unwrap_err();
        let (g, alpha) = v.witness.clone().unwrap();
        let d = s.ideal()[g].hasse_derivative(&alpha);
        assert!(!d.restrict_zero(&[0, 1]).is_zero());
        assert!(alpha.iter().map(|&a| a as u64).sum::<u64>() < 2);
    }

    #[test]
    fn translating_an_exceptional_variable_drops_its_divisor() {
        let r = ring3();
        let s = ChartState::new(r.clone(), vec![r.poly("x^3+z^13-z*w^18")]);
        let s = s
            .blowup(&BlowupSpec::point(4, 3), TransformKind::Weak)
            .unwrap();
        assert!(s.is_exceptional(3));
        assert!(!s.translate(3, 1).is_exceptional(3));
        assert!(s.translate(3, 0).is_exceptional(3));
    }

    #[test]
    fn history_roundtrip() {
        let r = ring3();
        let s = ChartState::new(r.clone(), vec![r.poly("x^3+z^13-z*w^18")]);
        let s = s
            .blowup(&BlowupSpec::point(4, 3), TransformKind::Weak)
            .unwrap()
            .translate(2, -1);
        let again = ChartState::replay(r.clone(), s.initial_ideal().to_vec(), s.history()).unwrap();
        assert_eq!(again, s);
        assert!(s.export_script().contains("translate z -1;"));
    }
}
