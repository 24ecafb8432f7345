//! The Hardy state of two qubits, its joint probabilities for the four
//! pairs of local observables, and the golden-mean table.
//!
//! Observable 2 has eigenstates `|2R⟩ = |0⟩`, `|2G⟩ = |1⟩`. Observable 1 is
//! the same pair rotated by `θ = arccos √x`: `|1R⟩ = (cos θ, sin θ)`,
//! `|1G⟩ = (sin θ, -cos θ)`. Red is the `+1` eigenvalue of each observable.
//! Both qubits use the same bases, and
//! `|Ψ⟩ ∝ |2R,2R⟩ - |1R,1R⟩⟨1R,1R|2R,2R⟩`.

use std::fmt;

use crate::ensemble::DensityOperator;
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, PureState};
use crate::tomography::{BasisDescriptor, CorrelationRecord, CorrelationSet, Partition};

/// The golden mean `(1 + √5)/2`.
pub fn tau() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Conditioning events below this probability leave the conditional undefined.
const EPS_CONDITION: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    One,
    Two,
}

impl Observable {
    fn digit(self) -> char {
        match self {
            Observable::One => '1',
            Observable::Two => '2',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Green,
}

impl Color {
    fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Green => 'G',
        }
    }
}

/// Which observable is measured on A and which on B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Setting {
    pub a: Observable,
    pub b: Observable,
}

impl Setting {
    pub const fn new(a: Observable, b: Observable) -> Self {
        Setting { a, b }
    }

    /// The same setting with A and B exchanged.
    pub fn swapped(self) -> Self {
        Setting {
            a: self.b,
            b: self.a,
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a.digit(), self.b.digit())
    }
}

/// Colors found on A and on B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub a: Color,
    pub b: Color,
}

impl Outcome {
    pub const fn new(a: Color, b: Color) -> Self {
        Outcome { a, b }
    }

    pub fn swapped(self) -> Self {
        Outcome {
            a: self.b,
            b: self.a,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a.letter(), self.b.letter())
    }
}

use Color::{Green, Red};
use Observable::{One, Two};

/// Table columns: 22, 11, 12, 21.
pub const SETTINGS: [Setting; 4] = [
    Setting::new(Two, Two),
    Setting::new(One, One),
    Setting::new(One, Two),
    Setting::new(Two, One),
];

/// Table rows: GG, GR, RG, RR.
pub const OUTCOMES: [Outcome; 4] = [
    Outcome::new(Green, Green),
    Outcome::new(Green, Red),
    Outcome::new(Red, Green),
    Outcome::new(Red, Red),
];

/// Golden-mean table as powers of `1/τ`, `[setting][outcome]`; `None` is an exact zero.
pub const GOLDEN_EXPONENTS: [[Option<i32>; 4]; 4] = [
    [Some(5), Some(4), Some(4), Some(1)],
    [Some(3), Some(2), Some(2), None],
    [None, Some(1), Some(3), Some(4)],
    [None, Some(3), Some(1), Some(4)],
];

/// `GOLDEN_EXPONENTS` evaluated.
pub fn golden_reference() -> [[f64; 4]; 4] {
    GOLDEN_EXPONENTS.map(|col| col.map(|e| e.map_or(0.0, |k| tau().powi(-k))))
}

/// `x²(1 - x)/(1 + x)`.
pub fn p22gg_closed_form(x: f64) -> f64 {
    x * x * (1.0 - x) / (1.0 + x)
}

#[derive(Clone, Debug)]
pub struct HardyContext {
    x: f64,
    theta: f64,
    /// `[observable 1, observable 2]`, each as `[red, green]` eigenstates.
    eigenstates: [[PureState; 2]; 2],
    state: PureState,
}

/// Builds the Hardy state for overlap `x = |⟨1R|2R⟩|²`, `0 < x < 1`.
pub fn hardy_state(x: f64) -> Result<HardyContext> {
    HardyContext::new(x)
}

impl HardyContext {
    pub fn new(x: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain { x });
        }
        let theta = x.sqrt().acos();
        let (c, s) = (theta.cos(), theta.sin());
        let one = [
            PureState::from_real(&[c, s])?,
            PureState::from_real(&[s, -c])?,
        ];
        let two = [PureState::basis(2, 0), PureState::basis(2, 1)];

        let rr2 = two[0].kron(&two[0]);
        let rr1 = one[0].kron(&one[0]);
        let overlap = rr1.inner(&rr2);
        let amplitudes = rr2
            .amplitudes()
            .iter()
            .zip(rr1.amplitudes())
            .map(|(a, b)| (a - b * overlap) / (1.0 - x * x).sqrt())
            .collect();
        let state = PureState::new(amplitudes)?;
        Ok(HardyContext {
            x,
            theta,
            eigenstates: [one, two],
            state,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::pure(&self.state)
    }

    pub fn eigenstate(&self, observable: Observable, color: Color) -> &PureState {
        let o = match observable {
            One => 0,
            Two => 1,
        };
        let c = match color {
            Red => 0,
            Green => 1,
        };
        &self.eigenstates[o][c]
    }

    /// `|R⟩⟨R| - |G⟩⟨G|`; the same operator on A and on B.
    pub fn observable(&self, observable: Observable) -> HermitianOperator {
        let red = self.eigenstate(observable, Red).projector();
        let green = self.eigenstate(observable, Green).projector();
        HermitianOperator::new(&red - &green).expect("difference of projectors")
    }

    fn product(&self, setting: Setting, outcome: Outcome) -> PureState {
        self.eigenstate(setting.a, outcome.a)
            .kron(self.eigenstate(setting.b, outcome.b))
    }

    /// `|⟨a, b|Ψ⟩|²`.
    pub fn joint_probability(&self, setting: Setting, outcome: Outcome) -> f64 {
        self.product(setting, outcome).fidelity(&self.state)
    }

    /// `⟨a, b|W|a, b⟩` for an arbitrary two-qubit `w` in the same local bases.
    pub fn joint_probability_in(
        &self,
        w: &DensityOperator,
        setting: Setting,
        outcome: Outcome,
    ) -> f64 {
        w.overlap(&self.product(setting, outcome))
    }

    pub fn table(&self) -> ProbabilityTable {
        self.table_of(|s, o| self.joint_probability(s, o))
    }

    /// The table evaluated on `w` instead of `|Ψ⟩⟨Ψ|`.
    pub fn table_in(&self, w: &DensityOperator) -> ProbabilityTable {
        self.table_of(|s, o| self.joint_probability_in(w, s, o))
    }

    fn table_of(&self, f: impl Fn(Setting, Outcome) -> f64) -> ProbabilityTable {
        ProbabilityTable {
            x: self.x,
            entries: SETTINGS.map(|s| OUTCOMES.map(|o| f(s, o))),
        }
    }

    /// Projectors `[1R, 1G, 2R, 2G]` as a basis descriptor for record files.
    /// They span only a three-dimensional operator space, so the descriptor
    /// labels the records but does not support reconstruction.
    pub fn projector_descriptor(&self) -> BasisDescriptor {
        let mut elements = Vec::new();
        let mut labels = Vec::new();
        for o in [One, Two] {
            for c in [Red, Green] {
                elements.push(self.eigenstate(o, c).projector());
                labels.push(format!("{}{}", o.digit(), c.letter()));
            }
        }
        BasisDescriptor::Explicit {
            elements,
            labels: Some(labels),
        }
    }
}

fn projector_index(o: Observable, c: Color) -> usize {
    let o = if o == One { 0 } else { 2 };
    o + if c == Red { 0 } else { 1 }
}

/// Joint probabilities, `entries[setting][outcome]` in `SETTINGS` x `OUTCOMES` order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    pub x: f64,
    pub entries: [[f64; 4]; 4],
}

impl ProbabilityTable {
    pub fn get(&self, setting: Setting, outcome: Outcome) -> f64 {
        let s = SETTINGS.iter().position(|&t| t == setting).unwrap();
        let o = OUTCOMES.iter().position(|&t| t == outcome).unwrap();
        self.entries[s][o]
    }

    pub fn column_sums(&self) -> [f64; 4] {
        self.entries.map(|col| col.iter().sum())
    }

    /// Largest entrywise difference from `other`.
    pub fn max_deviation(&self, other: &[[f64; 4]; 4]) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// The sixteen entries as correlation records on the projector
    /// descriptor of `ctx`: indices `[A projector, B projector]`.
    pub fn to_records(&self, ctx: &HardyContext) -> CorrelationSet {
        let mut records = Vec::with_capacity(16);
        for (s, setting) in SETTINGS.iter().enumerate() {
            for (o, outcome) in OUTCOMES.iter().enumerate() {
                records.push(CorrelationRecord {
                    indices: vec![
                        projector_index(setting.a, outcome.a),
                        projector_index(setting.b, outcome.b),
                    ],
                    value: self.entries[s][o],
                });
            }
        }
        records.sort_by(|a, b| a.indices.cmp(&b.indices));
        CorrelationSet {
            partition: Partition::new(vec![2, 2]).unwrap(),
            bases: vec![ctx.projector_descriptor(), ctx.projector_descriptor()],
            records,
        }
    }
}

impl fmt::Display for ProbabilityTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<4}", "p")?;
        for s in SETTINGS {
            write!(f, " {:>18}", s.to_string())?;
        }
        writeln!(f)?;
        for (o, outcome) in OUTCOMES.iter().enumerate() {
            write!(f, "{:<4}", outcome.to_string())?;
            for col in &self.entries {
                write!(f, " {:>18}", crate::report::fixed12(col[o]))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The table at `x = 1/τ`.
pub fn golden_table() -> ProbabilityTable {
    HardyContext::new(1.0 / tau())
        .expect("1/τ lies in (0, 1)")
        .table()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub p: f64,
}

fn p22gg(x: f64) -> f64 {
    let gg = Outcome::new(Green, Green);
    HardyContext::new(x)
        .map(|ctx| ctx.joint_probability(SETTINGS[0], gg))
        .unwrap_or(0.0)
}

/// Maximizes `p(2G, 2G)` over `x ∈ (0, 1)`.
///
/// Golden-section search brackets the maximum. Near the top the function
/// is flat to within rounding over a width of about `1e-8`, so the bracket
/// is then refined by bisection on the sign of a central-difference slope.
pub fn maximize_p22gg() -> Maximum {
    let inv_phi = 1.0 / tau();
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-6);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (p22gg(c), p22gg(d));
    while hi - lo > 1e-6 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = p22gg(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = p22gg(d);
        }
    }

    const H: f64 = 1e-6;
    let slope = |x: f64| p22gg(x + H) - p22gg(x - H);
    let (mut lo, mut hi) = (lo - 1e-6, hi + 1e-6);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    Maximum { x, p: p22gg(x) }
}

/// `(x, p(2G, 2G))` at `x = k/(n + 1)`, `k = 1..=n`.
pub fn sweep(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|k| {
            let x = k as f64 / (n + 1) as f64;
            (x, p22gg(x))
        })
        .collect()
}

/// A conditional probability read off one setting's joint distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditional {
    pub label: &'static str,
    pub setting: Setting,
    /// Probability of the conditioning event.
    pub given: f64,
    /// `None` when the conditioning event has (numerically) zero probability.
    pub value: Option<f64>,
}

fn conditional(
    ctx: &HardyContext,
    label: &'static str,
    setting: Setting,
    hit: Outcome,
    miss: Outcome,
) -> Conditional {
    let joint = ctx.joint_probability(setting, hit);
    let given = joint + ctx.joint_probability(setting, miss);
    Conditional {
        label,
        setting,
        given,
        value: (given > EPS_CONDITION).then(|| joint / given),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParadoxReport {
    pub x: f64,
    /// `p(1_AR|2_BG)`, `p(1_BG|1_AR)`, `p(2_AR|1_BG)`.
    pub chain: [Conditional; 3],
    /// `p(2_AG, 2_BG)`.
    pub joint_2g_2g: f64,
    /// `p(2_AR|2_BG)`, which the chain would force to 1.
    pub conclusion: Conditional,
    /// Every link equals 1 while the conclusion does not.
    pub paradox: bool,
}

pub const PARADOX_NOTE: &str = "each conditional comes from the joint distribution of a different \
pair of commuting observables; no joint distribution of all four observables exists, so the links \
cannot be chained";

pub fn paradox_report(ctx: &HardyContext) -> ParadoxReport {
    let s12 = Setting::new(One, Two);
    let s11 = Setting::new(One, One);
    let s21 = Setting::new(Two, One);
    let s22 = Setting::new(Two, Two);
    let chain = [
        conditional(
            ctx,
            "p(1_AR|2_BG)",
            s12,
            Outcome::new(Red, Green),
            Outcome::new(Green, Green),
        ),
        conditional(
            ctx,
            "p(1_BG|1_AR)",
            s11,
            Outcome::new(Red, Green),
            Outcome::new(Red, Red),
        ),
        conditional(
            ctx,
            "p(2_AR|1_BG)",
            s21,
            Outcome::new(Red, Green),
            Outcome::new(Green, Green),
        ),
    ];
    let conclusion = conditional(
        ctx,
        "p(2_AR|2_BG)",
        s22,
        Outcome::new(Red, Green),
        Outcome::new(Green, Green),
    );
    let links_hold = chain
        .iter()
        .all(|c| c.value.is_none_or(|v| (v - 1.0).abs() <= 1e-12));
    let paradox = links_hold && conclusion.value.is_some_and(|v| v < 1.0 - 1e-12);
    ParadoxReport {
        x: ctx.x(),
        chain,
        joint_2g_2g: ctx.joint_probability(s22, Outcome::new(Green, Green)),
        conclusion,
        paradox,
    }
}

impl fmt::Display for ParadoxReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or("undefined".to_string(), crate::report::fixed12);
        writeln!(f, "x = {}", crate::report::fixed12(self.x))?;
        for c in &self.chain {
            writeln!(
                f,
                "{} = {}  (setting {})",
                c.label,
                show(c.value),
                c.setting
            )?;
        }
        writeln!(
            f,
            "p(2_AG,2_BG) = {}",
            crate::report::fixed12(self.joint_2g_2g)
        )?;
        writeln!(
            f,
            "{} = {}  (setting {}, chained value 1)",
            self.conclusion.label,
            show(self.conclusion.value),
            self.conclusion.setting
        )?;
        writeln!(f, "paradox: {}", if self.paradox { "yes" } else { "no" })?;
        writeln!(f, "note: {PARADOX_NOTE}")
    }
}

/// `|Ψ⟩` written out in the canonical basis for a given `x`, built directly
/// from `θ`; exposed for checks against the projection construction.
pub fn hardy_amplitudes(x: f64) -> [f64; 4] {
    let (c, s) = (x.sqrt(), (1.0 - x).sqrt());
    // |2R,2R⟩ - c²|1R,1R⟩ with |1R⟩ = (c, s)
    let v = [
        1.0 - c.powi(4),
        -c.powi(3) * s,
        -c.powi(3) * s,
        -c * c * s * s,
    ];
    let n = (1.0 - x * x).sqrt();
    v.map(|a| a / n)
}
