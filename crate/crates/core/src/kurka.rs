//! Blocking words and sensitivity probes.
//!
//! A word `w` (anchored at position 0) is `s`-blocking at offset `p` when the
//! trace of the window `[p, p+s)` is the same for every configuration in `[w]`.
//! Certification here is exhaustive but bounded by a horizon `T`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::ca::{checked_pow, FiniteWord, LocalRule, PeriodicConfig, SeedStream};
use crate::cone;
use crate::error::{CaError, Result};
use crate::par;

/// Default cap on enumerated contexts per certification step.
pub const DEFAULT_MAX_CONTEXTS: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockingStatus {
    CertifiedUpToT,
    Refuted,
}

/// Two configurations in `[w]`, restricted to `[origin, origin + |x|)`, whose
/// window traces first disagree at `step`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub origin: i64,
    pub x: FiniteWord,
    pub y: FiniteWord,
    pub step: usize,
}

impl Counterexample {
    /// Re-simulates both segments and checks that the `[p, p+s)` windows agree
    /// before `step` and differ at `step`.
    pub fn replay(&self, rule: &LocalRule, p: usize, s: usize) -> bool {
        let r = rule.radius() as i64;
        let (p, s) = (p as i64, s as i64);
        let need_lo = p - self.step as i64 * r;
        let need_hi = p + s + self.step as i64 * r;
        let hi = self.origin + self.x.len() as i64;
        if self.x.len() != self.y.len() || self.origin > need_lo || hi < need_hi {
            return false;
        }
        let tx = segment_windows(rule, self.origin, self.x.letters(), p, s, self.step);
        let ty = segment_windows(rule, self.origin, self.y.letters(), p, s, self.step);
        tx[..self.step] == ty[..self.step] && tx[self.step] != ty[self.step]
    }
}

fn segment_windows(rule: &LocalRule, origin: i64, cells: &[u8], p: i64, s: i64, steps: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(steps + 1);
    cone::evolve(rule, origin, cells.to_vec(), steps, |_, lo, seg| {
        let a = (p - lo) as usize;
        out.push(seg[a..a + s as usize].to_vec());
        true
    });
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingCertificate {
    pub word: FiniteWord,
    pub s: usize,
    pub p: usize,
    pub horizon: usize,
    pub status: BlockingStatus,
    pub counterexample: Option<Counterexample>,
}

impl BlockingCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == BlockingStatus::CertifiedUpToT
    }
}

fn validate(rule: &LocalRule, w: &FiniteWord, s: usize, p: usize) -> Result<()> {
    rule.alphabet().check_letters(w.letters())?;
    if s == 0 {
        return Err(CaError::InvalidParameter("window width s must be >= 1".into()));
    }
    if p + s > w.len() {
        return Err(CaError::InvalidParameter(format!(
            "offset {p} + width {s} exceeds word length {}",
            w.len()
        )));
    }
    Ok(())
}

/// Exhaustively checks that the `[p, p+s)` trace of `[w]` is context-free up to step `T`.
pub fn certify_blocking(rule: &LocalRule, w: &FiniteWord, s: usize, p: usize, horizon: usize) -> Result<BlockingCertificate> {
    certify_blocking_with_limit(rule, w, s, p, horizon, DEFAULT_MAX_CONTEXTS)
}

/// As [`certify_blocking`] with an explicit cap on contexts enumerated per step.
///
/// Step `n` enumerates only the cells outside `w` that can reach the window in
/// `n` steps through the offsets the rule actually depends on.
pub fn certify_blocking_with_limit(
    rule: &LocalRule,
    w: &FiniteWord,
    s: usize,
    p: usize,
    horizon: usize,
    max_contexts: u128,
) -> Result<BlockingCertificate> {
    validate(rule, w, s, p)?;
    let certified = BlockingCertificate {
        word: w.clone(),
        s,
        p,
        horizon,
        status: BlockingStatus::CertifiedUpToT,
        counterexample: None,
    };
    let offsets = rule.essential_offsets();
    let (Some(&emin), Some(&emax)) = (offsets.first(), offsets.last()) else {
        // Constant rule: every window is fixed from step 1 on.
        return Ok(certified);
    };
    if s as i64 >= emax.max(-emin) {
        certify_split(rule, w, s, p, horizon, max_contexts, (emin, emax), certified)
    } else {
        certify_joint(rule, w, s, p, horizon, max_contexts, (emin, emax), certified)
    }
}

fn guard(k: usize, cells: usize, max_contexts: u128) -> Result<u128> {
    let contexts = checked_pow(k, cells).unwrap_or(u128::MAX);
    if contexts > max_contexts {
        return Err(CaError::GuardExceeded {
            what: "blocking-word contexts",
            needed: contexts,
            limit: max_contexts,
        });
    }
    Ok(contexts)
}

/// Rule output at cell `i`, reading neighbors through `get`.
fn output_at(rule: &LocalRule, i: i64, get: impl Fn(i64) -> u8) -> u8 {
    let r = rule.radius() as i64;
    let k = rule.k();
    rule.lookup((i - r..=i + r).fold(0, |acc, c| acc * k + get(c) as usize))
}

/// Letter of context `ctx` at cell `c`, for free cells `[start, end)` with the last cell least significant.
fn context_cell(k: usize, (start, end): (i64, i64), ctx: u128, c: i64) -> u8 {
    debug_assert!((start..end).contains(&c));
    let k = k as u128;
    ((ctx / k.pow((end - 1 - c) as u32)) % k) as u8
}

/// Certification for windows at least as wide as the rule's reach. While the window
/// trace is constant it separates the two sides, so left and right contexts are
/// enumerated independently: the window at step `n` is constant iff it is for every
/// pair of reachable strips bordering it at step `n - 1`.
#[allow(clippy::too_many_arguments)]
fn certify_split(
    rule: &LocalRule,
    w: &FiniteWord,
    s: usize,
    p: usize,
    horizon: usize,
    max_contexts: u128,
    (emin, emax): (i64, i64),
    certified: BlockingCertificate,
) -> Result<BlockingCertificate> {
    let k = rule.k();
    let r = rule.radius() as i64;
    let wlen = w.len() as i64;
    let (pi, si) = (p as i64, s as i64);
    let letter = |c: i64| if (0..wlen).contains(&c) { w.letters()[c as usize] } else { 0 };

    let reach = horizon as i64 * r;
    let zero: Vec<u8> = (pi - reach..pi + si + reach).map(letter).collect();
    let mut windows = Vec::with_capacity(horizon + 1);
    cone::evolve(rule, pi - reach, zero, horizon, |_, lo, seg| {
        let a = (pi - lo) as usize;
        windows.push(seg[a..a + s].to_vec());
        true
    });

    // Reachable strips `[p+emin, p)` (left) or `[p+s, p+s+emax)` (right) at steps
    // `0..h`, each with the smallest context producing it. One enumeration covers
    // every step below `h`.
    let strips = |h: usize, left: bool| -> Result<(StripSets, (i64, i64))> {
        let hi_ = h as i64;
        let (lo0, hi0) = if left { (pi + hi_ * emin, pi) } else { (pi + si, pi + si + hi_ * emax) };
        if lo0 >= hi0 {
            return Ok((vec![vec![(Vec::new(), 0)]; h], (0, 0)));
        }
        let width = if left { -emin } else { emax } as usize;
        let free = if left { (lo0, hi0.min(0)) } else { (lo0.max(wlen), hi0) };
        let count = guard(k, (free.1 - free.0).max(0) as usize, max_contexts)?;
        let run = |ctx: u128, out: &mut StripSets| {
            let mut lo = lo0;
            let mut seg: Vec<u8> = (lo0..hi0)
                .map(|c| if (free.0..free.1).contains(&c) { context_cell(k, free, ctx, c) } else { letter(c) })
                .collect();
            for (j, window) in windows[..h].iter().enumerate() {
                let strip = if left { &seg[seg.len() - width..] } else { &seg[..width] };
                if !out[j].iter().any(|(s, _)| s == strip) {
                    out[j].push((strip.to_vec(), ctx));
                }
                if j + 1 == h {
                    break;
                }
                let (nlo, nhi) = if left { (lo - emin, pi) } else { (pi + si, lo + seg.len() as i64 - emax) };
                let get = |c: i64| {
                    if (lo..lo + seg.len() as i64).contains(&c) {
                        seg[(c - lo) as usize]
                    } else if (pi..pi + si).contains(&c) {
                        window[(c - pi) as usize]
                    } else {
                        0
                    }
                };
                let next: Vec<u8> = (nlo..nhi).map(|i| output_at(rule, i, get)).collect();
                seg = next;
                lo = nlo;
            }
        };
        let chunks = count.div_ceil(CHUNK) as usize;
        let per_chunk = par::map_range(chunks, |c| {
            let first = c as u128 * CHUNK;
            let mut local = vec![Vec::new(); h];
            for ctx in first..(first + CHUNK).min(count) {
                run(ctx, &mut local);
            }
            local
        });
        let mut sets: StripSets = vec![Vec::new(); h];
        for local in per_chunk {
            for (j, found) in local.into_iter().enumerate() {
                sets[j].extend(found);
            }
        }
        for set in &mut sets {
            set.sort();
            set.dedup_by(|b, a| a.0 == b.0);
        }
        Ok((sets, free))
    };

    let mut checked = 0;
    let mut h = 1;
    while checked < horizon {
        h = (2 * h).min(horizon);
        let (left, lfree) = strips(h, true)?;
        let (right, rfree) = strips(h, false)?;
        for n in checked + 1..=h {
            let prev = &windows[n - 1];
            for (a, ca) in &left[n - 1] {
                for (b, cb) in &right[n - 1] {
                    let get = |c: i64| {
                        if (pi..pi + si).contains(&c) {
                            prev[(c - pi) as usize]
                        } else if c < pi && c >= pi - a.len() as i64 {
                            a[(c - pi + a.len() as i64) as usize]
                        } else if c >= pi + si && c < pi + si + b.len() as i64 {
                            b[(c - pi - si) as usize]
                        } else {
                            0
                        }
                    };
                    if (pi..pi + si).all(|i| output_at(rule, i, get) == windows[n][(i - pi) as usize]) {
                        continue;
                    }
                    let ni = n as i64;
                    let origin = pi - ni * r;
                    let cells = |ctx: bool| -> Vec<u8> {
                        (origin..pi + si + ni * r)
                            .map(|c| match () {
                                _ if ctx && (lfree.0..lfree.1).contains(&c) => context_cell(k, lfree, *ca, c),
                                _ if ctx && (rfree.0..rfree.1).contains(&c) => context_cell(k, rfree, *cb, c),
                                _ => letter(c),
                            })
                            .collect()
                    };
                    return Ok(BlockingCertificate {
                        status: BlockingStatus::Refuted,
                        counterexample: Some(Counterexample {
                            origin,
                            x: FiniteWord::from_letters(cells(false)),
                            y: FiniteWord::from_letters(cells(true)),
                            step: n,
                        }),
                        ..certified
                    });
                }
            }
        }
        checked = h;
    }
    Ok(certified)
}

const CHUNK: u128 = 4096;

/// Per step, each reachable strip with a context producing it.
type StripSets = Vec<Vec<(Vec<u8>, u128)>>;

/// Enumerates every context of the step-`n` dependence cone jointly.
#[allow(clippy::too_many_arguments)]
fn certify_joint(
    rule: &LocalRule,
    w: &FiniteWord,
    s: usize,
    p: usize,
    horizon: usize,
    max_contexts: u128,
    (emin, emax): (i64, i64),
    certified: BlockingCertificate,
) -> Result<BlockingCertificate> {
    let k = rule.k();
    let r = rule.radius() as i64;
    let wlen = w.len() as i64;
    let (pi, si) = (p as i64, s as i64);

    for n in 1..=horizon {
        let ni = n as i64;
        let free: Vec<i64> = (pi + ni * emin..pi + si + ni * emax)
            .filter(|&c| c < 0 || c >= wlen)
            .collect();
        if free.is_empty() {
            continue;
        }
        let contexts = checked_pow(k, free.len()).unwrap_or(u128::MAX);
        if contexts > max_contexts {
            return Err(CaError::GuardExceeded {
                what: "blocking-word contexts",
                needed: contexts,
                limit: max_contexts,
            });
        }
        let origin = pi - ni * r;
        let width = (si + 2 * ni * r) as usize;
        let build = |ctx: u128| -> Vec<u8> {
            let mut cells = vec![0u8; width];
            for (i, c) in (origin..origin + width as i64).enumerate() {
                if (0..wlen).contains(&c) {
                    cells[i] = w.letters()[c as usize];
                }
            }
            let mut rest = ctx;
            for &c in free.iter().rev() {
                cells[(c - origin) as usize] = (rest % k as u128) as u8;
                rest /= k as u128;
            }
            cells
        };
        let final_window = |cells: Vec<u8>| -> Vec<u8> {
            let mut last = Vec::new();
            cone::evolve(rule, origin, cells, n, |j, lo, seg| {
                if j == n {
                    let a = (pi - lo) as usize;
                    last = seg[a..a + s].to_vec();
                }
                true
            });
            last
        };
        let reference = final_window(build(0));
        let hit = par::find_first(contexts - 1, 4096, |c| {
            let cells = build(c + 1);
            (final_window(cells.clone()) != reference).then_some(cells)
        });
        if let Some(y) = hit {
            return Ok(BlockingCertificate {
                status: BlockingStatus::Refuted,
                counterexample: Some(Counterexample {
                    origin,
                    x: FiniteWord::from_letters(build(0)),
                    y: FiniteWord::from_letters(y),
                    step: n,
                }),
                ..certified
            });
        }
    }
    Ok(certified)
}

/// Random search for two contexts of `[w]` whose window traces differ within `T` steps.
/// `None` is not a certificate.
pub fn falsify_blocking(
    rule: &LocalRule,
    w: &FiniteWord,
    s: usize,
    p: usize,
    horizon: usize,
    samples: usize,
    stream: &SeedStream,
) -> Result<Option<Counterexample>> {
    validate(rule, w, s, p)?;
    let k = rule.k() as u8;
    let r = rule.radius() as i64;
    let (pi, si) = (p as i64, s as i64);
    let origin = pi - horizon as i64 * r;
    let width = (si + 2 * horizon as i64 * r) as usize;
    let wlen = w.len() as i64;
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<u8> {
        use rand::Rng;
        (origin..origin + width as i64)
            .map(|c| {
                if (0..wlen).contains(&c) {
                    w.letters()[c as usize]
                } else {
                    rng.random_range(0..k)
                }
            })
            .collect()
    };
    Ok(par::find_first(samples as u128, 16, |i| {
        let mut rng = stream.substream(i as u64).rng();
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let tx = segment_windows(rule, origin, &x, pi, si, horizon);
        let ty = segment_windows(rule, origin, &y, pi, si, horizon);
        tx.iter().zip(&ty).position(|(a, b)| a != b).map(|step| Counterexample {
            origin,
            x: FiniteWord::from_letters(x),
            y: FiniteWord::from_letters(y),
            step,
        })
    }))
}

/// All `T`-certified `s`-blocking words of length `s..=max_len`, over every offset.
/// An empty result means none were found within the envelope.
pub fn find_blocking_words(rule: &LocalRule, s: usize, max_len: usize, horizon: usize) -> Result<Vec<BlockingCertificate>> {
    find_blocking_words_with_limit(rule, s, max_len, horizon, DEFAULT_MAX_CONTEXTS)
}

pub fn find_blocking_words_with_limit(
    rule: &LocalRule,
    s: usize,
    max_len: usize,
    horizon: usize,
    max_contexts: u128,
) -> Result<Vec<BlockingCertificate>> {
    if s == 0 {
        return Err(CaError::InvalidParameter("window width s must be >= 1".into()));
    }
    let k = rule.k();
    let mut found: Vec<BlockingCertificate> = Vec::new();
    let mut certified: HashSet<(Vec<u8>, usize)> = HashSet::new();
    for len in s..=max_len {
        let count = checked_pow(k, len).filter(|&c| c <= max_contexts).ok_or(CaError::GuardExceeded {
            what: "candidate words",
            needed: checked_pow(k, len).unwrap_or(u128::MAX),
            limit: max_contexts,
        })?;
        let candidates: Vec<(FiniteWord, usize)> = (0..count)
            .flat_map(|idx| {
                let word = FiniteWord::from_index(idx, len, k);
                (0..=len - s).map(move |p| (word.clone(), p))
            })
            .collect();
        let results = par::map_slice(&candidates, |(word, p)| {
            // An extension of a certified word, window unchanged, only narrows the contexts.
            let letters = word.letters();
            let inherited = (0..=*p).any(|q| {
                (*p + s..=len).any(|end| end - q < len && certified.contains(&(letters[q..end].to_vec(), p - q)))
            });
            if inherited {
                Ok(BlockingCertificate {
                    word: word.clone(),
                    s,
                    p: *p,
                    horizon,
                    status: BlockingStatus::CertifiedUpToT,
                    counterexample: None,
                })
            } else {
                certify_blocking_with_limit(rule, word, s, *p, horizon, max_contexts)
            }
        });
        for cert in results {
            let cert = cert?;
            if cert.is_certified() {
                certified.insert((cert.word.letters().to_vec(), cert.p));
                found.push(cert);
            }
        }
    }
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub fraction: f64,
    pub stayed_close: u64,
    pub samples: u64,
}

/// Fraction of sampled `y` agreeing with `x` on `[-n, n)` whose orbit stays within
/// `2^-m` of the orbit of `x` (agreement on `[-m, m]`) for all steps `<= T`.
pub fn equicontinuity_probe(
    rule: &LocalRule,
    x: &PeriodicConfig,
    m: usize,
    n: usize,
    horizon: usize,
    samples: usize,
    stream: &SeedStream,
) -> Result<ProbeResult> {
    rule.alphabet().ensure_same(x.alphabet())?;
    if m == 0 || n < m {
        return Err(CaError::InvalidParameter(format!("need n >= m >= 1, got m={m}, n={n}")));
    }
    if samples == 0 {
        return Err(CaError::InvalidParameter("samples must be >= 1".into()));
    }
    let measure = crate::ca::BernoulliMeasure::uniform(rule.alphabet());
    let (mi, ni) = (m as i64, n as i64);
    let keep = (2 * ni) as usize;
    let reference = cone::window_trace(rule, x, -mi, mi + 1, horizon);
    let close = par::map_range(samples, |i| -> Result<bool> {
        let y = if keep >= x.period() {
            x.clone()
        } else {
            measure.resample_outside(x, -ni, ni, &stream.substream(i as u64))?
        };
        Ok(cone::window_trace(rule, &y, -mi, mi + 1, horizon) == reference)
    })
    .into_iter()
    .collect::<Result<Vec<bool>>>()?;
    let stayed_close = close.iter().filter(|&&c| c).count() as u64;
    Ok(ProbeResult {
        fraction: stayed_close as f64 / samples as f64,
        stayed_close,
        samples: samples as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KurkaClass {
    /// Radius-0 rule: every point is equicontinuous.
    Equicontinuous,
    /// Some `r`-blocking word certified: not sensitive.
    BlockingWordFound,
    /// No `r`-blocking word within the envelope: sensitivity candidate.
    NoBlockingWordFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KurkaParams {
    pub max_len: usize,
    pub horizon: usize,
    pub max_contexts: u128,
}

impl Default for KurkaParams {
    fn default() -> Self {
        KurkaParams {
            max_len: 6,
            horizon: 16,
            max_contexts: DEFAULT_MAX_CONTEXTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KurkaVerdict {
    pub class: KurkaClass,
    pub s: usize,
    pub max_len: usize,
    pub horizon: usize,
    pub certificates: Vec<BlockingCertificate>,
}

impl KurkaVerdict {
    pub fn has_blocking_word(&self) -> bool {
        !matches!(self.class, KurkaClass::NoBlockingWordFound)
    }
}

/// Searches for `r`-blocking words with `s = r`.
pub fn classify_kurka(rule: &LocalRule, params: &KurkaParams) -> Result<KurkaVerdict> {
    let r = rule.radius();
    if r == 0 {
        return Ok(KurkaVerdict {
            class: KurkaClass::Equicontinuous,
            s: 0,
            max_len: params.max_len,
            horizon: params.horizon,
            certificates: Vec::new(),
        });
    }
    let certificates = find_blocking_words_with_limit(rule, r, params.max_len, params.horizon, params.max_contexts)?;
    let class = if certificates.is_empty() {
        KurkaClass::NoBlockingWordFound
    } else {
        KurkaClass::BlockingWordFound
    };
    Ok(KurkaVerdict {
        class,
        s: r,
        max_len: params.max_len,
        horizon: params.horizon,
        certificates,
    })
}

/// `F^j(x)(i1, i2)` for `j = 0..=T`.
pub fn trace(rule: &LocalRule, x: &PeriodicConfig, i1: i64, i2: i64, horizon: usize) -> Result<Vec<FiniteWord>> {
    rule.alphabet().ensure_same(x.alphabet())?;
    if i1 >= i2 {
        return Err(CaError::InvalidInterval { start: i1, end: i2 });
    }
    Ok(cone::window_trace(rule, x, i1, i2, horizon)
        .into_iter()
        .map(FiniteWord::from_letters)
        .collect())
}
