use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::spectral::{forward, inverse, PeriodicGrid, C64, Vec2};

pub type SymbolFn = Arc<dyn Fn(Vec2, Vec2) -> C64 + Send + Sync>;
type ColumnFn = Arc<dyn Fn(Vec2) -> Vec<C64> + Send + Sync>;

/// Cached columns are capped at this many complex entries per symbol.
const CACHE_BUDGET: usize = 1 << 22;

#[derive(Clone)]
enum Repr {
    Pointwise(SymbolFn),
    /// Symbol known only through its x-spectrum on one grid.
    Columns { grid: PeriodicGrid, column: ColumnFn },
}

#[derive(Default)]
struct ColumnCache {
    entries: HashMap<[u64; 5], Arc<Vec<C64>>>,
    stored: usize,
}

/// A symbol `a(x, ξ)` with its declared order `m` and x-regularity `ρ`.
///
/// Columns `θ ↦ â(θ, ξ)` (the x-spectrum at a fixed frequency) are computed on
/// demand and memoized; clones share the memo.
#[derive(Clone)]
pub struct SymbolField {
    repr: Repr,
    order: f64,
    rho: f64,
    homogeneous: bool,
    cache: Arc<Mutex<ColumnCache>>,
}

impl fmt::Debug for SymbolField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolField")
            .field("order", &self.order)
            .field("rho", &self.rho)
            .field("homogeneous", &self.homogeneous)
            .field("tabulated", &matches!(self.repr, Repr::Columns { .. }))
            .finish()
    }
}

fn key(grid: &PeriodicGrid, xi: Vec2) -> [u64; 5] {
    [grid.dim() as u64, grid.points() as u64, grid.extent().to_bits(), xi[0].to_bits(), xi[1].to_bits()]
}

impl SymbolField {
    pub fn new(f: impl Fn(Vec2, Vec2) -> C64 + Send + Sync + 'static, order: f64, rho: f64) -> Self {
        Self::from_arc(Arc::new(f), order, rho)
    }

    pub fn from_arc(f: SymbolFn, order: f64, rho: f64) -> Self {
        Self { repr: Repr::Pointwise(f), order, rho, homogeneous: false, cache: Default::default() }
    }

    /// Real-valued convenience constructor.
    pub fn real(f: impl Fn(Vec2, Vec2) -> f64 + Send + Sync + 'static, order: f64, rho: f64) -> Self {
        Self::new(move |x, xi| C64::new(f(x, xi), 0.0), order, rho)
    }

    pub fn constant(c: f64) -> Self {
        Self::real(move |_, _| c, 0.0, f64::INFINITY).homogeneous(true)
    }

    /// A symbol given by its x-spectrum on `grid` for every frequency.
    pub fn from_columns(
        grid: &PeriodicGrid,
        column: impl Fn(Vec2) -> Vec<C64> + Send + Sync + 'static,
        order: f64,
        rho: f64,
    ) -> Self {
        Self {
            repr: Repr::Columns { grid: grid.clone(), column: Arc::new(column) },
            order,
            rho,
            homogeneous: false,
            cache: Default::default(),
        }
    }

    pub fn homogeneous(mut self, flag: bool) -> Self {
        self.homogeneous = flag;
        self
    }

    pub fn with_order(mut self, order: f64) -> Self {
        self.order = order;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// The grid a tabulated symbol lives on, if any.
    pub fn native_grid(&self) -> Option<&PeriodicGrid> {
        match &self.repr {
            Repr::Pointwise(_) => None,
            Repr::Columns { grid, .. } => Some(grid),
        }
    }

    pub fn eval(&self, x: Vec2, xi: Vec2) -> C64 {
        match &self.repr {
            Repr::Pointwise(f) => f(x, xi),
            Repr::Columns { grid, .. } => {
                let col = self.column(grid, xi);
                let mut s = C64::new(0.0, 0.0);
                for (i, c) in col.iter().enumerate() {
                    if c.norm_sqr() != 0.0 {
                        let th = grid.frequency(i);
                        s += c * C64::from_polar(1.0, th[0] * x[0] + th[1] * x[1]);
                    }
                }
                s
            }
        }
    }

    /// `x ↦ a(x, ξ)` on the points of `grid`.
    pub fn samples(&self, grid: &PeriodicGrid, xi: Vec2) -> Vec<C64> {
        match &self.repr {
            Repr::Pointwise(f) => grid.points_iter().map(|x| f(x, xi)).collect(),
            Repr::Columns { grid: native, column } if native == grid => inverse(grid, &column(xi)),
            Repr::Columns { .. } => grid.points_iter().map(|x| self.eval(x, xi)).collect(),
        }
    }

    /// Lattice x-spectrum of `a(·, ξ)` on `grid`.
    pub fn column(&self, grid: &PeriodicGrid, xi: Vec2) -> Arc<Vec<C64>> {
        let k = key(grid, xi);
        if let Some(c) = self.cache.lock().expect("symbol cache poisoned").entries.get(&k) {
            return Arc::clone(c);
        }
        let col = Arc::new(match &self.repr {
            Repr::Columns { grid: native, column } if native == grid => column(xi),
            _ => forward(grid, &self.samples(grid, xi)),
        });
        let mut cache = self.cache.lock().expect("symbol cache poisoned");
        if cache.stored + col.len() <= CACHE_BUDGET {
            cache.stored += col.len();
            cache.entries.insert(k, Arc::clone(&col));
        }
        col
    }

    /// Largest relative deviation from `a(x, λξ) = λ^m a(x, ξ)` over the given samples.
    pub fn homogeneity_defect(&self, points: &[Vec2], freqs: &[Vec2], lambdas: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &x in points {
            for &xi in freqs {
                let base = self.eval(x, xi);
                for &l in lambdas {
                    let lhs = self.eval(x, [l * xi[0], l * xi[1]]);
                    let rhs = base * l.powf(self.order);
                    worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1e-300));
                }
            }
        }
        worst
    }

    /// `true` when every sample on `grid` at every lattice `|ξ| ≥ 1/2` is finite.
    pub fn is_finite_on(&self, grid: &PeriodicGrid) -> bool {
        grid.frequencies()
            .filter(|xi| crate::spectral::norm(*xi) >= 0.5)
            .all(|xi| self.samples(grid, xi).iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }
}
