use crate::error::{Error, Result};

/// Limits on the exhaustive searches.
///
/// Every search checks its nominal size against one of these fields before it
/// starts and fails with [`Error::BudgetExceeded`] instead of running away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// log2 of the number of candidate operation tables a polymorphism
    /// enumeration may range over (`n^k * log2(n)`).
    pub max_candidate_bits: f64,
    /// Largest operation table (`n^m` entries) the pp-definability test may
    /// treat as a constraint network.
    pub max_table_size: usize,
    /// Largest carrier allowed for powers of algebras.
    pub max_elements: usize,
    /// Cap on the number of members of a generated clone fragment.
    pub max_clone_size: usize,
    /// Cap on partitions / subuniverses / generator images enumerated by
    /// the algebraic searches.
    pub max_search: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_candidate_bits: 24.0,
            max_table_size: 1 << 14,
            max_elements: 1 << 16,
            max_clone_size: 1 << 20,
            max_search: 1 << 26,
        }
    }
}

impl Budget {
    /// No effective limits. Intended for tests and trusted small inputs.
    pub fn unbounded() -> Self {
        Budget {
            max_candidate_bits: f64::INFINITY,
            max_table_size: usize::MAX,
            max_elements: usize::MAX,
            max_clone_size: usize::MAX,
            max_search: u64::MAX,
        }
    }

    pub fn with_candidate_bits(mut self, bits: f64) -> Self {
        self.max_candidate_bits = bits;
        self
    }

    pub(crate) fn check_candidates(&self, domain_size: usize, arity: usize) -> Result<()> {
        let bits = candidate_bits(domain_size, arity);
        if bits > self.max_candidate_bits {
            return Err(Error::budget(
                format!("{arity}-ary tables on a {domain_size}-element domain"),
                format!("2^{bits:.1} candidates"),
                format!("2^{}", self.max_candidate_bits),
            ));
        }
        Ok(())
    }

    pub(crate) fn check_elements(&self, what: &str, count: Option<usize>) -> Result<usize> {
        match count {
            Some(c) if c <= self.max_elements => Ok(c),
            Some(c) => Err(Error::budget(what, c, self.max_elements)),
            None => Err(Error::budget(what, "overflow", self.max_elements)),
        }
    }

    pub(crate) fn check_search(&self, what: &str, count: Option<u64>) -> Result<u64> {
        match count {
            Some(c) if c <= self.max_search => Ok(c),
            Some(c) => Err(Error::budget(what, c, self.max_search)),
            None => Err(Error::budget(what, "overflow", self.max_search)),
        }
    }
}

/// `log2` of `n^(n^k)`.
pub fn candidate_bits(domain_size: usize, arity: usize) -> f64 {
    if domain_size <= 1 {
        return 0.0;
    }
    (domain_size as f64).powi(arity as i32) * (domain_size as f64).log2()
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}
