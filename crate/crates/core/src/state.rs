//! Finite state spaces with mixed-radix state ids.

use std::fmt;

use crate::error::{Error, Result};

/// Default bound on `D^|vars|`.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// What an assignment does with a value outside `0..D`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OverflowMode {
    #[default]
    Strict,
    Clamp,
}

/// Variables ranging over `{0, …, D−1}`. The first variable is the most
/// significant digit of a state id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    vars: Vec<String>,
    domain: i64,
    overflow: OverflowMode,
    size: usize,
    strides: Vec<usize>,
}

/// A valuation, stored in variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vec<i64>);

impl StateSpace {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>, domain: i64) -> Result<Self> {
        Self::with_cap(vars, domain, DEFAULT_STATE_CAP)
    }

    pub fn with_cap<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        domain: i64,
        cap: usize,
    ) -> Result<Self> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        assert!(domain >= 1, "domain size must be positive");
        let size = (domain as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::StateSpaceTooLarge { size, cap });
        }
        let size = size as usize;
        let n = vars.len();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * domain as usize;
        }
        Ok(StateSpace { vars, domain, overflow: OverflowMode::Strict, size, strides })
    }

    pub fn with_overflow(mut self, overflow: OverflowMode) -> Self {
        self.overflow = overflow;
        self
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn domain(&self) -> i64 {
        self.domain
    }

    pub fn overflow(&self) -> OverflowMode {
        self.overflow
    }

    /// `|Σ|`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn require(&self, var: &str) -> Result<usize> {
        self.index_of(var).ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn stride(&self, var: usize) -> usize {
        self.strides[var]
    }

    pub fn encode(&self, s: &State) -> usize {
        s.0.iter().zip(&self.strides).map(|(&v, &k)| v as usize * k).sum()
    }

    pub fn decode(&self, id: usize) -> State {
        let mut v = vec![0; self.vars.len()];
        self.decode_into(id, &mut v);
        State(v)
    }

    pub fn decode_into(&self, id: usize, out: &mut [i64]) {
        for (i, &k) in self.strides.iter().enumerate() {
            out[i] = ((id / k) % self.domain as usize) as i64;
        }
    }

    /// Value of variable `var` in state `id`.
    pub fn value(&self, id: usize, var: usize) -> i64 {
        ((id / self.strides[var]) % self.domain as usize) as i64
    }

    /// Id of `id[var ↦ v]`; `v` must already be in the domain.
    pub fn with_value(&self, id: usize, var: usize, v: i64) -> usize {
        let old = self.value(id, var);
        (id as i64 + (v - old) * self.strides[var] as i64) as usize
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.size).map(|id| self.decode(id))
    }

    /// Applies the overflow policy to a value about to be written to `var`.
    pub fn store(&self, var: usize, v: i64, at: usize) -> Result<i64> {
        if (0..self.domain).contains(&v) {
            return Ok(v);
        }
        match self.overflow {
            OverflowMode::Clamp => Ok(v.clamp(0, self.domain - 1)),
            OverflowMode::Strict => Err(Error::DomainOverflow {
                var: self.vars[var].clone(),
                value: v,
                domain: self.domain,
                state: self.show(at),
                unrolling: None,
            }),
        }
    }

    /// `σ[x ↦ v]`.
    pub fn update(&self, s: &State, var: &str, v: i64) -> Result<State> {
        let i = self.require(var)?;
        if !(0..self.domain).contains(&v) {
            return Err(Error::DomainOverflow {
                var: var.to_string(),
                value: v,
                domain: self.domain,
                state: self.show_state(s),
                unrolling: None,
            });
        }
        let mut out = s.clone();
        out.0[i] = v;
        Ok(out)
    }

    /// Builds a state from `name = value` pairs; missing variables are 0.
    pub fn state_from<'a>(&self, pairs: impl IntoIterator<Item = (&'a str, i64)>) -> Result<State> {
        let mut s = State(vec![0; self.vars.len()]);
        for (name, v) in pairs {
            s = self.update(&s, name, v)?;
        }
        Ok(s)
    }

    pub fn id_of<'a>(&self, pairs: impl IntoIterator<Item = (&'a str, i64)>) -> Result<usize> {
        Ok(self.encode(&self.state_from(pairs)?))
    }

    pub fn show(&self, id: usize) -> String {
        self.show_state(&self.decode(id))
    }

    pub fn show_state(&self, s: &State) -> String {
        ShowState(self, s).to_string()
    }
}

struct ShowState<'a>(&'a StateSpace, &'a State);

impl fmt::Display for ShowState<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (name, v)) in self.0.vars.iter().zip(&self.1 .0).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}: {v}")?;
        }
        f.write_str("}")
    }
}
