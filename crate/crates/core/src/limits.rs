//! Size bounds shared by every construction and search.

/// Environment variable overriding [`Limits::max_order`].
pub const MAX_ORDER_ENV: &str = "BEAUVILLE_MAX_ORDER";

pub const DEFAULT_MAX_ORDER: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest group order that may be enumerated with a full Cayley table.
    pub max_order: usize,
    /// Largest automorphism group that is materialized element by element.
    /// Bigger groups are handled through generators and streamed searches.
    pub max_automorphisms: usize,
    /// Largest point set an orbit partition may allocate.
    pub max_points: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: DEFAULT_MAX_ORDER,
            max_automorphisms: 100_000,
            max_points: 50_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with `max_order` taken from `BEAUVILLE_MAX_ORDER` when set to a positive integer.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(MAX_ORDER_ENV) {
            if let Ok(v) = raw.trim().parse::<usize>() {
                if v > 0 {
                    limits.max_order = v;
                }
            }
        }
        limits
    }
}
