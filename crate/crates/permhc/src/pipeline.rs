//! Orchestration: parameter selection, field-extension bootstrapping, the
//! finite-field counters, and the integer CRT driver.

use crate::error::{Error, Result};
use crate::evaluator::{CountMode, EvaluatorFamily};
use crate::field::{is_prime_u64, FieldCtx, FieldElem};
use crate::kakeya::KakeyaSet;
use crate::matrix::{FieldMatrix, IntMatrix, Matrix};
use crate::oracles::{hc_brute, hc_dp, per_brute, per_ryser};
use crate::reduction::{default_strategy, strategy, ReductionStrategy};
use crate::reveal::{reveal, RevealOptions, RevealParams};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::iter::{ParallelBridge, ParallelIterator};

/// Default cofactor targets; a prime power is always coprime to one of
/// `{10, 11}` (permanent) or `{17, 18}` (Hamiltonian cycles).
fn default_cofactor(mode: CountMode) -> u64 {
    match mode {
        CountMode::Per => 10,
        CountMode::Hc => 17,
    }
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub b: Option<u64>,
    pub k: Option<usize>,
    pub strict: bool,
}

#[derive(Clone, Debug)]
pub struct PipelineParams {
    pub mode: CountMode,
    pub strict: bool,
    /// Field size the algorithm runs in (after any bootstrap).
    pub q: u64,
    pub b: u64,
    pub theta: f64,
    pub k: usize,
    pub u: u64,
    pub r: usize,
}

impl PipelineParams {
    pub fn reveal_params(&self) -> RevealParams {
        RevealParams { k: self.k, b: self.b, u: self.u, r: self.r }
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Divisor of `q - 1` with `u >= 1`, nearest to the mode's default (ties to
/// the smaller candidate).
fn auto_cofactor(qm1: u64, mode: CountMode) -> Option<u64> {
    let target = default_cofactor(mode);
    divisors(qm1)
        .into_iter()
        .filter(|&d| d >= 2 && d <= qm1 / 2)
        .min_by_key(|&d| (d.abs_diff(target), d))
}

/// Smallest divisor of `q - 1` meeting the strict lower bound with `u >= 1`.
fn strict_cofactor(qm1: u64, mode: CountMode) -> Option<u64> {
    let floor = default_cofactor(mode);
    divisors(qm1)
        .into_iter()
        .find(|&d| d >= floor && d <= qm1 / 2)
}

pub fn theta_for(b: u64) -> f64 {
    (1.9f64.ln() / ((1 + b) as f64).ln()).sqrt()
}

/// Binary entropy in bits.
pub fn binary_entropy(alpha: f64) -> f64 {
    if alpha <= 0.0 || alpha >= 1.0 {
        return 0.0;
    }
    -alpha * alpha.log2() - (1.0 - alpha) * (1.0 - alpha).log2()
}

/// Picks `(b, theta, k, u, r)` for a run over `F_q`. `q` is the field the
/// algorithm executes in, so callers bootstrap first. Non-strict mode admits
/// any `b >= 2` dividing `q - 1`; strict mode enforces the analysis-side
/// bounds (`q >= n^2 + 1`, `b >= 10` or `17`).
pub fn select_params(
    n: usize,
    q: u64,
    mode: CountMode,
    over: &Overrides,
) -> Result<PipelineParams> {
    if n == 0 {
        return Err(Error::Dimension("n must be at least 1".into()));
    }
    if over.strict && q < (n * n + 1) as u64 {
        return Err(Error::Strict(format!("q >= n^2 + 1 = {}, got q = {q}", n * n + 1)));
    }
    let qm1 = q - 1;
    let b = match over.b {
        Some(b) => {
            if b < 2 || qm1 % b != 0 {
                return Err(Error::BadCofactor { b, qm1 });
            }
            if qm1 / b < 2 {
                return Err(Error::DegenerateCurve { q, b });
            }
            if over.strict && b < default_cofactor(mode) {
                return Err(Error::Strict(format!(
                    "b >= {} in strict mode, got {b}",
                    default_cofactor(mode)
                )));
            }
            b
        }
        None => {
            let found = if over.strict {
                strict_cofactor(qm1, mode)
            } else {
                auto_cofactor(qm1, mode)
            };
            found.ok_or(Error::NoValidCofactor(qm1))?
        }
    };
    let theta = theta_for(b);
    let formula_k = ((theta * (n as f64).sqrt()).floor() as usize).clamp(1, n);
    let k = match over.k {
        Some(k) => {
            if k < 1 || k > n {
                return Err(Error::Dimension(format!("k = {k} out of range 1..={n}")));
            }
            k
        }
        None => {
            // The reduction needs q >= k^2 + 1 below the identity size.
            let mut k = formula_k;
            while k > 1 && k < n && q < (k * k + 1) as u64 {
                k -= 1;
            }
            k
        }
    };
    if k < n && q < (k * k + 1) as u64 {
        return Err(Error::FieldTooSmall { q, need: (k * k + 1) as u64 });
    }
    let rp = RevealParams::new(q, k, b)?;
    Ok(PipelineParams { mode, strict: over.strict, q, b, theta, k, u: rp.u, r: rp.r })
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out -= out / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

#[derive(Debug)]
pub struct Bootstrap {
    pub ell: usize,
    pub ext: FieldCtx,
    pub b: u64,
}

/// Chooses the cofactor modulus and the extension degree making the field
/// usable: `b` is the first of `{10, 11}` (per) or `{17, 18}` (hc) coprime
/// to `q`. If `q` already satisfies `q = 1 (mod b)`, `q >= n^2 + 1` and the
/// curve degree is positive, no extension is needed; otherwise `ell` is the
/// smallest multiple of `phi(b)` with `q^ell > n^2` (and a positive curve
/// degree), which forces `q^ell = 1 (mod b)`.
pub fn bootstrap_field(base: &FieldCtx, n: usize, mode: CountMode) -> Result<Bootstrap> {
    let q = base.q();
    let m0 = default_cofactor(mode);
    let b = if base.p() % m0 != 0 && m0 % base.p() != 0 && gcd(q % m0, m0) == 1 {
        m0
    } else {
        let m1 = m0 + 1;
        if gcd(q % m1, m1) != 1 {
            return Err(Error::Internal(format!(
                "prime power {q} shares factors with both {m0} and {m1}"
            )));
        }
        m1
    };
    let n2 = (n as u64).saturating_mul(n as u64);
    if q % b == 1 && q > n2 && (q - 1) / b >= 2 {
        return Ok(Bootstrap { ell: 1, ext: base.clone(), b });
    }
    let phi = euler_phi(b);
    let mut ell = phi;
    loop {
        let q_ext = (0..ell).try_fold(1u64, |acc, _| acc.checked_mul(q));
        match q_ext {
            Some(qe) if qe > n2 && qe >= 2 * b + 1 => {
                let ext = FieldCtx::new(base.p(), base.ell() * ell as usize)?;
                debug_assert_eq!(ext.q() % b, 1);
                return Ok(Bootstrap { ell: ell as usize, ext, b });
            }
            Some(_) => ell += phi,
            None => return Err(Error::FieldTooLarge),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Embeds a matrix over the prime subfield into an extension of it.
fn embed_matrix(base: &FieldCtx, ext: &FieldCtx, a: &FieldMatrix) -> Result<FieldMatrix> {
    if base == ext {
        return Ok(a.clone());
    }
    let mut out = Vec::with_capacity(a.n() * a.n());
    for e in a.entries() {
        if e.coeffs().iter().skip(1).any(|&c| c != 0) {
            return Err(Error::Unsupported(
                "bootstrapping requires entries in the prime subfield".into(),
            ));
        }
        out.push(ext.from_u64(e.coeffs()[0]));
    }
    Matrix::from_vec(a.n(), out)
}

/// Projects an extension-field value known to lie in the base field back
/// down; any nonzero high coefficient signals an internal bug.
fn project_to_base(base: &FieldCtx, ext: &FieldCtx, v: &FieldElem) -> Result<FieldElem> {
    if base == ext {
        return Ok(v.clone());
    }
    if v.coeffs().iter().skip(1).any(|&c| c != 0) {
        return Err(Error::Internal(format!(
            "result {} does not lie in the base field",
            ext.format_elem(v)
        )));
    }
    Ok(base.from_u64(v.coeffs()[0]))
}

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub strict: bool,
    pub b: Option<u64>,
    pub k: Option<usize>,
    /// Build evaluators for all of K up front instead of on demand.
    pub eager: bool,
    pub reveal: RevealOptions,
    /// Reduction strategy name; default resolves `faithful` then `laplace`.
    pub strategy: Option<String>,
    pub cache_cap: Option<usize>,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            strict: false,
            b: None,
            k: None,
            eager: false,
            reveal: RevealOptions::default(),
            strategy: None,
            cache_cap: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CountStats {
    pub n: usize,
    pub base_q: u64,
    pub ext_q: u64,
    pub ell: usize,
    pub b: u64,
    pub k: usize,
    pub r: usize,
    pub instances: u64,
    /// r-order evaluation queries; always `ext_q * instances`.
    pub queries: u64,
    pub series_mults: u64,
    pub builds: u64,
    pub strategy: &'static str,
}

/// Crude cost model for the non-strict choice of `k`: instance count times
/// per-instance reveal work plus evaluator construction.
fn auto_k(
    n: usize,
    q_ext: u64,
    b: u64,
    mode: CountMode,
    strat: &dyn ReductionStrategy,
) -> usize {
    let u = (q_ext - 1) / b - 1;
    let q = q_ext as f64;
    let mut best = (f64::INFINITY, 1usize);
    for k in 1..=n {
        if k < n && q_ext < (k * k + 1) as u64 {
            continue;
        }
        let r = (k as u64).div_ceil(b) as f64;
        let m_vars = (k * k) as f64;
        let m_inst = strat.instance_bound(n, k, mode).min(1e30);
        let shift_per_coord = if u <= 64 {
            (u as f64 + 1.0) * r
        } else {
            r * (2.0 * (u as f64).log2() + 4.0)
        };
        let query = {
            let mut sum = 0f64;
            let mut c = 1f64;
            for j in 0..r as usize {
                sum += c * c * (j as f64 + 1.0);
                c = c * (k as f64 - j as f64) / (j as f64 + 1.0);
            }
            sum * r * r
        };
        let interp = if q * r <= 4096.0 {
            (q * r) * (q * r) * r
        } else {
            q * r * (r + q.log2())
        };
        let per_instance = q * (m_vars * shift_per_coord + query) + interp;
        let build = match mode {
            CountMode::Per => {
                let mut sum = 0f64;
                let mut c = 1f64;
                for j in 0..r as usize {
                    sum += c * c * (k as f64 - j as f64) * 2f64.powi((k - j) as i32);
                    c = c * (k as f64 - j as f64) / (j as f64 + 1.0);
                }
                sum
            }
            CountMode::Hc => {
                let mut c_sum = 0f64;
                let mut c = 1f64;
                for j in 0..r as usize {
                    c_sum += c;
                    c = c * (k as f64 - j as f64) / (j as f64 + 1.0);
                }
                c_sum * (k * k) as f64 * 4f64.powi(k as i32)
            }
        };
        let touches = m_inst * q;
        let kakeya_points = ((b + 1) as f64).powi((k * k + 1).min(200) as i32);
        let builds = touches.min(kakeya_points);
        let total = m_inst * per_instance + builds * build;
        if total < best.0 {
            best = (total, k);
        }
    }
    best.1
}

/// Counts `per(A)` or `hc(A)` over the matrix's field through the full
/// pipeline: bootstrap, Kakeya set, self-reduction, per-instance reveal.
pub fn count_ff(
    ctx: &FieldCtx,
    a: &FieldMatrix,
    mode: CountMode,
    opts: &CountOptions,
) -> Result<(FieldElem, CountStats)> {
    let n = a.n();
    if n == 0 {
        return Err(Error::Dimension("count_ff needs n >= 1".into()));
    }
    let strat = match &opts.strategy {
        Some(name) => strategy(name)
            .ok_or_else(|| Error::Unsupported(format!("unknown reduction strategy `{name}`")))?,
        None => default_strategy(),
    };

    // Work out where the computation runs: the base field when it admits a
    // valid cofactor (non-strict) or meets the strict conditions, otherwise
    // the bootstrapped extension.
    let (ext, ell, b) = if opts.strict {
        let n2 = (n * n) as u64;
        let strict_ok = ctx.q() > n2
            && match opts.b {
                Some(b) => b >= default_cofactor(mode) && (ctx.q() - 1) % b == 0 && (ctx.q() - 1) / b >= 2,
                None => strict_cofactor(ctx.q() - 1, mode).is_some(),
            };
        if strict_ok {
            let b = match opts.b {
                Some(b) => b,
                None => strict_cofactor(ctx.q() - 1, mode).unwrap(),
            };
            (ctx.clone(), 1usize, b)
        } else {
            let boot = bootstrap_field(ctx, n, mode)?;
            (boot.ext, boot.ell, boot.b)
        }
    } else {
        match opts.b {
            Some(b) => {
                if (ctx.q() - 1) % b != 0 || b < 2 {
                    return Err(Error::BadCofactor { b, qm1: ctx.q() - 1 });
                }
                if (ctx.q() - 1) / b < 2 {
                    return Err(Error::DegenerateCurve { q: ctx.q(), b });
                }
                (ctx.clone(), 1usize, b)
            }
            None => match auto_cofactor(ctx.q() - 1, mode) {
                Some(b) => (ctx.clone(), 1usize, b),
                None => {
                    let boot = bootstrap_field(ctx, n, mode)?;
                    (boot.ext, boot.ell, boot.b)
                }
            },
        }
    };

    let k = match opts.k {
        Some(k) => Some(k),
        None if !opts.strict => Some(auto_k(n, ext.q(), b, mode, strat)),
        None => None,
    };
    let over = Overrides { b: Some(b), k, strict: opts.strict };
    let params = select_params(n, ext.q(), mode, &over)?;

    let embedded = embed_matrix(ctx, &ext, a)?;
    let kakeya = KakeyaSet::build(&ext, params.k * params.k, params.b)?;
    let mut family = EvaluatorFamily::new(&ext, params.k, params.r, mode);
    if let Some(cap) = opts.cache_cap {
        family = family.with_cache_cap(cap);
    }
    if opts.eager {
        family.build_all(&kakeya)?;
    }
    let rparams = params.reveal_params();

    let stream = strat.stream(&ext, &embedded, params.k, mode)?;
    let zero = ext.zero();
    let folded = stream
        .par_bridge()
        .map(|inst| -> Result<(FieldElem, u64, u64, u64)> {
            let (val, st) = reveal(&family, &kakeya, &inst.matrix.to_point(), &rparams, &opts.reveal)?;
            Ok((ext.mul(&inst.weight, &val), 1, st.queries, st.series_mults))
        })
        .try_reduce(
            || (zero.clone(), 0u64, 0u64, 0u64),
            |x, y| Ok((ext.add(&x.0, &y.0), x.1 + y.1, x.2 + y.2, x.3 + y.3)),
        )?;

    let value = project_to_base(ctx, &ext, &folded.0)?;
    let stats = CountStats {
        n,
        base_q: ctx.q(),
        ext_q: ext.q(),
        ell,
        b: params.b,
        k: params.k,
        r: params.r,
        instances: folded.1,
        queries: folded.2,
        series_mults: folded.3,
        builds: family.builds(),
        strategy: strat.name(),
    };
    Ok((value, stats))
}

/// Smallest primes, in increasing order, whose product exceeds `2C + 1`.
pub fn choose_primes(c: &BigInt) -> Vec<u64> {
    let c = if c < &BigInt::one() { BigInt::one() } else { c.clone() };
    let target = BigInt::from(2) * &c + BigInt::one();
    let mut primes = Vec::new();
    let mut product = BigInt::one();
    let mut p = 2u64;
    while product <= target {
        while !is_prime_u64(p) {
            p += 1;
        }
        primes.push(p);
        product *= BigInt::from(p);
        p += 1;
    }
    primes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidueMode {
    /// Brute force up to n = 6, Ryser / subset DP up to the threshold, the
    /// subexponential pipeline beyond.
    Auto,
    Classical,
    Subexp,
}

#[derive(Clone, Debug)]
pub struct CountIntOptions {
    pub residues: ResidueMode,
    /// Above this size Auto routes residues through the pipeline.
    pub subexp_threshold: usize,
    pub ff: CountOptions,
}

impl Default for CountIntOptions {
    fn default() -> Self {
        CountIntOptions {
            residues: ResidueMode::Auto,
            subexp_threshold: 24,
            ff: CountOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CountIntStats {
    pub primes: Vec<u64>,
    pub queries: u64,
    pub instances: u64,
}

fn residue_mod_p(a: &IntMatrix, ctx: &FieldCtx) -> FieldMatrix {
    let p = BigInt::from(ctx.p());
    a.map(|e| ctx.from_u64(e.mod_floor(&p).to_u64().expect("residue fits u64")))
}

/// Exact integer permanent / Hamiltonian-cycle count via per-prime residues
/// and a balanced CRT lift, handling negative entries and results.
pub fn count_int(
    a: &IntMatrix,
    mode: CountMode,
    opts: &CountIntOptions,
) -> Result<(BigInt, CountIntStats)> {
    let n = a.n();
    if n == 0 {
        return match mode {
            CountMode::Per => Ok((BigInt::one(), CountIntStats::default())),
            CountMode::Hc => Err(Error::Dimension("hc needs n >= 1".into())),
        };
    }
    // |count| <= n! * M^n.
    let m_bound = a
        .entries()
        .iter()
        .map(|e| e.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    let mut c = BigInt::one();
    for i in 1..=n {
        c *= BigInt::from(i);
    }
    c *= m_bound.pow(n as u32);
    let primes = choose_primes(&c);

    let residues: Vec<(u64, u64)> = primes
        .iter()
        .map(|&p| -> Result<(u64, u64)> {
            let ctx = FieldCtx::new(p, 1)?;
            let ap = residue_mod_p(a, &ctx);
            let use_subexp = match opts.residues {
                ResidueMode::Subexp => true,
                ResidueMode::Classical => false,
                ResidueMode::Auto => n > opts.subexp_threshold,
            };
            let v = if use_subexp {
                count_ff(&ctx, &ap, mode, &opts.ff)?.0
            } else if n <= 6 {
                match mode {
                    CountMode::Per => per_brute(&ctx, &ap, 6)?,
                    CountMode::Hc => hc_brute(&ctx, &ap, 6)?,
                }
            } else {
                match mode {
                    CountMode::Per => per_ryser(&ctx, &ap),
                    CountMode::Hc => hc_dp(&ctx, &ap),
                }
            };
            Ok((p, ctx.elem_index(&v)))
        })
        .collect::<Result<Vec<_>>>()?;

    // Incremental CRT, then the balanced lift into [-(D-1)/2, (D-1)/2].
    let mut x = BigInt::zero();
    let mut modulus = BigInt::one();
    for &(p, r) in &residues {
        let pb = BigInt::from(p);
        let current = x.mod_floor(&pb);
        let mut delta = (BigInt::from(r) - current).mod_floor(&pb);
        let inv = mod_inverse(&modulus.mod_floor(&pb), &pb).ok_or_else(|| {
            Error::Internal("moduli are not coprime".into())
        })?;
        delta = (delta * inv).mod_floor(&pb);
        x += &modulus * delta;
        modulus *= pb;
    }
    if BigInt::from(2) * &x > modulus {
        x -= &modulus;
    }
    let stats = CountIntStats { primes, queries: 0, instances: 0 };
    Ok((x, stats))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Advisory cost report: entropy-based query exponents, the parameter
/// choices, and the exponent margin per unit of k.
#[derive(Clone, Debug)]
pub struct CostReport {
    pub mode: CountMode,
    pub n: usize,
    pub b: u64,
    pub entropy: f64,
    /// `2 H(1/b)` for the permanent, `3 H(1/b)` for Hamiltonian cycles.
    pub query_exponent: f64,
    pub theta: f64,
    pub k: usize,
    /// `log2` of the Kakeya size bound `(b+1)^(k^2+1)`.
    pub kakeya_log2: f64,
    /// `log2` of the predicted instance count `2^(n-k)`.
    pub instances_log2: f64,
    /// `1 - query_exponent`: exponent saved per unit of k.
    pub margin_coeff: f64,
    /// `margin_coeff * theta`: exponent saved per sqrt(n).
    pub delta: f64,
}

pub fn estimate_cost(n: usize, b: u64, mode: CountMode) -> Result<CostReport> {
    if b < 3 {
        return Err(Error::Unsupported("cost estimate needs 0 < 1/b < 1/2".into()));
    }
    let alpha = 1.0 / b as f64;
    let entropy = binary_entropy(alpha);
    let query_exponent = match mode {
        CountMode::Per => 2.0 * entropy,
        CountMode::Hc => 3.0 * entropy,
    };
    let theta = theta_for(b);
    let k = ((theta * (n as f64).sqrt()).floor() as usize).clamp(1, n);
    Ok(CostReport {
        mode,
        n,
        b,
        entropy,
        query_exponent,
        theta,
        k,
        kakeya_log2: ((k * k + 1) as f64) * ((b + 1) as f64).log2(),
        instances_log2: (n - k) as f64,
        margin_coeff: 1.0 - query_exponent,
        delta: (1.0 - query_exponent) * theta,
    })
}

impl std::fmt::Display for CostReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "mode            {}", self.mode.name())?;
        writeln!(f, "n               {}", self.n)?;
        writeln!(f, "b               {}", self.b)?;
        writeln!(f, "H(1/b)          {:.6}", self.entropy)?;
        writeln!(f, "query exponent  {:.6}", self.query_exponent)?;
        writeln!(f, "theta           {:.6}", self.theta)?;
        writeln!(f, "k               {}", self.k)?;
        writeln!(f, "log2 |K| bound  {:.3}", self.kakeya_log2)?;
        writeln!(f, "log2 instances  {:.3}", self.instances_log2)?;
        writeln!(f, "margin coeff    {:.6}", self.margin_coeff)?;
        write!(f, "delta           {:.6}", self.delta)
    }
}
