//! Bounded experiments on output languages: exhaustive image enumeration,
//! δ/d-completeness checks, pumping-decomposition search and growth
//! profiles.
//!
//! Everything here works on finite samples. Membership questions that a
//! sample cannot settle are reported as unknown, never guessed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::{self, Function};
use crate::par::{self, Execution};
use crate::psi::{dcomplete_witness, marker_blocks};
use crate::words::{Alphabet, Symbol, Word};

pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Number of words of length at most `max_len` over `k` letters, saturating.
pub fn input_count(k: usize, max_len: usize) -> u64 {
    let mut total: u64 = 0;
    let mut layer: u64 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(k as u64);
    }
    total
}

/// The `idx`-th word of length `len` in lexicographic order.
fn nth_word(letters: &[Symbol], len: usize, mut idx: u64) -> Word {
    let k = letters.len() as u64;
    let mut out = vec![letters[0].clone(); len];
    for slot in out.iter_mut().rev() {
        *slot = letters[(idx % k) as usize].clone();
        idx /= k;
    }
    Word(out)
}

/// All words of length at most `max_len`, shortest first, then
/// lexicographically.
pub fn all_words(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let letters: Vec<Symbol> = alphabet.iter().cloned().collect();
    (0..=max_len)
        .flat_map(|len| {
            let letters = letters.clone();
            (0..(letters.len() as u64).pow(len as u32)).map(move |i| nth_word(&letters, len, i))
        })
        .collect()
}

/// `{ f(w) : |w| ≤ max_len }`, each output with its least witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageSample {
    pub function: String,
    pub alphabet: Alphabet,
    pub max_len: usize,
    pub words: BTreeMap<Word, Word>,
    /// `max_output_len[l]` is the longest output over inputs of length `l`.
    pub max_output_len: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    function: String,
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    max_len: usize,
    count: usize,
    max_output_len: Vec<usize>,
}

fn render(w: &Word) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.render()
    }
}

impl LanguageSample {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains_key(w)
    }

    pub fn output_alphabet(&self) -> Alphabet {
        let letters: BTreeSet<&str> = self.words.keys().flat_map(|w| w.iter().map(Symbol::as_str)).collect();
        Alphabet::new(letters).unwrap_or_else(|_| Alphabet::empty())
    }

    /// Longest output over the whole sample.
    pub fn max_output(&self) -> usize {
        self.max_output_len.iter().copied().max().unwrap_or(0)
    }

    /// Re-evaluates every witness and compares.
    pub fn replay(&self, f: &Function) -> Result<bool> {
        for (out, w) in &self.words {
            if &f.apply(w)? != out {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_file_string(&self) -> String {
        let names = |a: &Alphabet| a.iter().map(|s| s.as_str().to_string()).collect::<Vec<_>>();
        let manifest = Manifest {
            function: self.function.clone(),
            input_alphabet: names(&self.alphabet),
            output_alphabet: names(&self.output_alphabet()),
            max_len: self.max_len,
            count: self.words.len(),
            max_output_len: self.max_output_len.clone(),
        };
        let mut s = format!("#manifest {}\n", serde_json::to_string(&manifest).expect("serializable"));
        for (out, w) in &self.words {
            writeln!(s, "{}\t{}", render(out), render(w)).unwrap();
        }
        s
    }

    pub fn parse_file(src: &str) -> Result<LanguageSample> {
        let mut lines = src.lines();
        let head = lines.next().and_then(|l| l.strip_prefix("#manifest ")).ok_or_else(|| Error::Parse("sample file must start with `#manifest {...}`".into()))?;
        let m: Manifest = serde_json::from_str(head).map_err(|e| Error::Parse(format!("bad manifest: {e}")))?;
        let alphabet = Alphabet::new(m.input_alphabet.iter().map(String::as_str))?;
        let out_alpha = if m.output_alphabet.is_empty() { Alphabet::empty() } else { Alphabet::new(m.output_alphabet.iter().map(String::as_str))? };
        let mut words = BTreeMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (out, w) = line.split_once('\t').ok_or_else(|| Error::Parse(format!("expected `output<TAB>witness`, got {line:?}")))?;
            words.insert(Word::parse_with(out, &out_alpha)?, Word::parse_with(w, &alphabet)?);
        }
        if words.len() != m.count {
            return Err(Error::Parse(format!("manifest says {} words, file has {}", m.count, words.len())));
        }
        Ok(LanguageSample { function: m.function, alphabet, max_len: m.max_len, words, max_output_len: m.max_output_len })
    }
}

/// Evaluates `f` on every word of length at most `max_len` over
/// `alphabet`. Fails when that is more than `budget` inputs.
pub fn enumerate_image(f: &Function, alphabet: &Alphabet, max_len: usize, budget: u64, exec: Execution) -> Result<LanguageSample> {
    let total = input_count(alphabet.len(), max_len);
    if total > budget {
        return Err(Error::BudgetExceeded(format!(
            "{total} inputs of length ≤ {max_len} over {alphabet}, budget {budget}; try a smaller max length"
        )));
    }
    let letters: Vec<Symbol> = alphabet.iter().cloned().collect();
    let mut words = BTreeMap::new();
    let mut max_output_len = Vec::with_capacity(max_len + 1);
    for len in 0..=max_len {
        let count = (letters.len() as u64).pow(len as u32);
        let outs = par::map_range(exec, count as usize, |i| {
            let w = nth_word(&letters, len, i as u64);
            f.apply(&w).map(|out| (out, w))
        });
        let mut longest = 0;
        for r in outs {
            let (out, w) = r?;
            longest = longest.max(out.len());
            words.entry(out).or_insert(w);
        }
        max_output_len.push(longest);
    }
    Ok(LanguageSample { function: f.id().to_string(), alphabet: alphabet.clone(), max_len, words, max_output_len })
}

// d-completeness -------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub word: String,
    pub witness: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DirectionReport {
    pub checked: usize,
    pub passed: usize,
    pub unknown: Vec<Finding>,
    pub failures: Vec<Finding>,
}

impl DirectionReport {
    fn pass(&mut self) {
        self.checked += 1;
        self.passed += 1;
    }

    fn unknown(&mut self, word: &Word, witness: &Word, reason: String) {
        self.checked += 1;
        self.unknown.push(Finding { word: render(word), witness: render(witness), reason });
    }

    fn fail(&mut self, word: &Word, witness: &Word, reason: String) {
        self.checked += 1;
        self.failures.push(Finding { word: render(word), witness: render(witness), reason });
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DcompleteReport {
    pub prime: String,
    pub base: String,
    pub output_markers: Vec<String>,
    pub input_markers: Vec<String>,
    /// Erasing the output markers from the decorated language stays inside
    /// the base language.
    pub erasure: DirectionReport,
    /// Every base word has a decorated preimage with pairwise distinct
    /// inner marker blocks that erases back to it.
    pub delta: DirectionReport,
}

impl DcompleteReport {
    pub fn passed(&self) -> bool {
        self.erasure.failures.is_empty() && self.delta.failures.is_empty()
    }

    pub fn conclusive(&self) -> bool {
        self.erasure.unknown.is_empty() && self.delta.unknown.is_empty()
    }
}

/// Checks δ- and d-completeness of the sampled decorated language `prime`
/// for the sampled base language `base`, with output decorations `delta`.
///
/// The decorated function is taken from `prime_fn`, or resolved from the
/// sample's function id; the base function likewise. Without them the
/// affected checks come back unknown.
pub fn check_dcomplete(
    prime: &LanguageSample,
    base: &LanguageSample,
    delta: &Alphabet,
    prime_fn: Option<&Function>,
    base_fn: Option<&Function>,
) -> DcompleteReport {
    let resolved_prime = prime_fn.is_none().then(|| func::resolve(&prime.function).ok()).flatten();
    let resolved_base = base_fn.is_none().then(|| func::resolve(&base.function).ok()).flatten();
    let prime_fn = prime_fn.or(resolved_prime.as_ref());
    let base_fn = base_fn.or(resolved_base.as_ref());
    let in_markers = prime.alphabet.difference(&base.alphabet);
    let club = club_for(prime_fn, &in_markers);

    let mut erasure = DirectionReport::default();
    for (out, w) in &prime.words {
        let erased = out.erase(delta);
        if base.contains(&erased) {
            erasure.pass();
            continue;
        }
        match base_fn.map(|f| f.apply(&w.erase(&in_markers))) {
            Some(Ok(v)) if v == erased => erasure.pass(),
            Some(Err(e)) => erasure.unknown(out, w, format!("base function failed on the undecorated witness: {e}")),
            _ => erasure.unknown(out, w, format!("erased word {} not in the base sample (max input length {})", render(&erased), base.max_len)),
        }
    }

    let mut delta_rep = DirectionReport::default();
    for (v, u) in &base.words {
        let Some(f) = prime_fn else {
            delta_rep.unknown(v, u, format!("cannot resolve decorated function `{}`", prime.function));
            continue;
        };
        let input = match &club {
            Some(c) => dcomplete_witness(u).render(c),
            None => u.clone(),
        };
        let out = match f.apply(&input) {
            Ok(o) => o,
            Err(e) => {
                delta_rep.fail(v, u, format!("decorated function failed on {}: {e}", render(&input)));
                continue;
            }
        };
        let (letters, blocks) = marker_blocks(&out, delta);
        if &letters != v {
            delta_rep.fail(v, u, format!("witness output {} does not erase to the base word", render(&out)));
            continue;
        }
        let inner = if blocks.len() > 2 { &blocks[1..blocks.len() - 1] } else { &[][..] };
        let distinct: BTreeSet<&Word> = inner.iter().collect();
        if distinct.len() == inner.len() {
            delta_rep.pass();
        } else {
            delta_rep.fail(v, u, format!("inner marker blocks of {} repeat", render(&out)));
        }
    }

    let names = |a: &Alphabet| a.iter().map(|s| s.as_str().to_string()).collect();
    DcompleteReport {
        prime: prime.function.clone(),
        base: base.function.clone(),
        output_markers: names(delta),
        input_markers: names(&in_markers),
        erasure,
        delta: delta_rep,
    }
}

/// The padding letter for witnesses: the newest `♣` of an interpretation
/// built by Ψ, else the only new input letter.
fn club_for(prime_fn: Option<&Function>, in_markers: &Alphabet) -> Option<Symbol> {
    if let Some(m) = prime_fn.and_then(Function::interpretation).and_then(|i| i.markers.last()) {
        return Some(m.club.clone());
    }
    if in_markers.len() == 1 {
        return in_markers.iter().next().cloned();
    }
    None
}

// Pumping ---------------------------------------------------------------

/// `w = u₀ v₁ u₁ … v_k u_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PumpDecomposition {
    pub us: Vec<Word>,
    pub vs: Vec<Word>,
    pub k: usize,
    #[serde(rename = "K")]
    pub big_k: usize,
}

impl PumpDecomposition {
    pub fn pumped(&self, n: usize) -> Word {
        let mut w = self.us[0].clone();
        for (v, u) in self.vs.iter().zip(&self.us[1..]) {
            w.extend_from(&v.repeat(n));
            w.extend_from(u);
        }
        w
    }

    /// Concatenation equals `w`, some `vᵢ` is non-empty, every
    /// `|vᵢ| ≤ K`, and the shape has `k` pumped factors.
    pub fn is_valid_for(&self, w: &Word) -> bool {
        self.vs.len() == self.k
            && self.us.len() == self.k + 1
            && self.pumped(1) == *w
            && self.vs.iter().any(|v| !v.is_empty())
            && self.vs.iter().all(|v| v.len() <= self.big_k)
    }

    pub fn render(&self) -> String {
        let mut parts = vec![format!("u0={}", render(&self.us[0]))];
        for (i, (v, u)) in self.vs.iter().zip(&self.us[1..]).enumerate() {
            parts.push(format!("v{}={}", i + 1, render(v)));
            parts.push(format!("u{}={}", i + 1, render(u)));
        }
        parts.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum PumpOutcome {
    Found { decomposition: PumpDecomposition, candidates: u64 },
    /// No verified decomposition; evidence, not a disproof.
    None { reason: String, candidates: u64 },
}

pub const PUMP_EXPONENTS: [usize; 3] = [0, 2, 3];
pub const DEFAULT_PUMP_BUDGET: u64 = 10_000_000;

/// Searches cut points `(s₁,l₁,…,s_k,l_k)` in lexicographic order for a
/// decomposition whose pumped words for `n ∈ {0,2,3}` all lie in
/// `extended`.
pub fn pump_search(
    sample: &LanguageSample,
    w: &Word,
    k: usize,
    big_k: usize,
    extended: &LanguageSample,
    budget: u64,
) -> Result<PumpOutcome> {
    if !sample.contains(w) {
        return Err(Error::Precondition(format!("{} is not in the sample of `{}`", render(w), sample.function)));
    }
    if k == 0 {
        return Ok(PumpOutcome::None { reason: "k = 0 leaves nothing to pump".into(), candidates: 0 });
    }
    if w.len() < big_k {
        return Ok(PumpOutcome::None { reason: "below pumping threshold".into(), candidates: 0 });
    }
    let mut search = PumpSearch { w, k, big_k, extended, budget, tried: 0, cuts: Vec::with_capacity(k) };
    match search.go(0)? {
        Some(d) => {
            assert!(d.is_valid_for(w), "pump search produced an invalid decomposition");
            Ok(PumpOutcome::Found { decomposition: d, candidates: search.tried })
        }
        None => Ok(PumpOutcome::None {
            reason: format!("no decomposition with pumped words inside the extended sample (max input length {})", extended.max_len),
            candidates: search.tried,
        }),
    }
}

struct PumpSearch<'a> {
    w: &'a Word,
    k: usize,
    big_k: usize,
    extended: &'a LanguageSample,
    budget: u64,
    tried: u64,
    cuts: Vec<(usize, usize)>,
}

impl PumpSearch<'_> {
    fn go(&mut self, from: usize) -> Result<Option<PumpDecomposition>> {
        if self.cuts.len() == self.k {
            if self.cuts.iter().all(|&(_, l)| l == 0) {
                return Ok(None);
            }
            self.tried += 1;
            if self.tried > self.budget {
                return Err(Error::BudgetExceeded(format!(
                    "pump search tried {} candidates without success; last cut points {:?}",
                    self.budget, self.cuts
                )));
            }
            let d = self.decomposition();
            let ok = PUMP_EXPONENTS.iter().all(|&n| self.extended.contains(&d.pumped(n)));
            return Ok(ok.then_some(d));
        }
        let n = self.w.len();
        for s in from..=n {
            for l in 0..=self.big_k.min(n - s) {
                // an empty factor sits right after the previous one
                if l == 0 && s != from {
                    continue;
                }
                self.cuts.push((s, l));
                let found = self.go(s + l)?;
                self.cuts.pop();
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        Ok(None)
    }

    fn decomposition(&self) -> PumpDecomposition {
        let sym = self.w.symbols();
        let mut us = Vec::new();
        let mut vs = Vec::new();
        let mut at = 0;
        for &(s, l) in &self.cuts {
            us.push(Word(sym[at..s].to_vec()));
            vs.push(Word(sym[s..s + l].to_vec()));
            at = s + l;
        }
        us.push(Word(sym[at..].to_vec()));
        PumpDecomposition { us, vs, k: self.k, big_k: self.big_k }
    }
}

// Growth ----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub length: usize,
    pub max_output: usize,
    pub samples: usize,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub function: String,
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `log max|f(w)|` against `log |w|`.
    pub slope: f64,
    pub bounded: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct GrowthOptions {
    pub seed: u64,
    /// Lengths with at most this many inputs are evaluated exhaustively.
    pub exhaustive_budget: u64,
    pub random_samples: usize,
    pub exec: Execution,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { seed: 0, exhaustive_budget: 20_000, random_samples: 200, exec: Execution::Parallel }
    }
}

/// Inputs of length `n` made of repeated blocks `c^m s` and `c^m d s`.
fn structured_inputs(letters: &[Symbol], n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 {
        return vec![Word::empty()];
    }
    let step = (n / 48).max(1);
    for s in letters {
        for c in letters.iter().filter(|c| *c != s) {
            for d in letters.iter().filter(|d| *d != s) {
                for m in (1..=n).step_by(step) {
                    let mut unit = vec![c.clone(); m];
                    if d != c {
                        unit.push(d.clone());
                    }
                    unit.push(s.clone());
                    let mut w: Vec<Symbol> = unit.iter().cycle().take(n).cloned().collect();
                    w.truncate(n);
                    out.push(Word(w));
                }
            }
        }
    }
    if letters.len() == 1 {
        out.push(Word(vec![letters[0].clone(); n]));
    }
    out
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Samples `max |f(w)|` at each length and fits a power law.
pub fn growth_degree(f: &Function, alphabet: &Alphabet, lengths: &[usize], opts: GrowthOptions) -> Result<GrowthEstimate> {
    let letters: Vec<Symbol> = alphabet.iter().cloned().collect();
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut rows = Vec::new();
    for &n in lengths {
        let count = (letters.len() as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        let exhaustive = count <= opts.exhaustive_budget;
        let inputs: Vec<Word> = if exhaustive {
            (0..count).map(|i| nth_word(&letters, n, i)).collect()
        } else {
            let mut v = structured_inputs(&letters, n);
            v.extend((0..opts.random_samples).map(|_| Word((0..n).map(|_| letters[rng.gen_range(0..letters.len())].clone()).collect())));
            v
        };
        let lens = par::try_map(opts.exec, &inputs, |w| f.apply(w).map(|o| o.len()))?;
        rows.push(GrowthRow { length: n, max_output: lens.into_iter().max().unwrap_or(0), samples: inputs.len(), exhaustive });
    }
    let bounded = rows.windows(2).all(|r| r[0].max_output == r[1].max_output);
    let points: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.length > 0 && r.max_output > 0).map(|r| ((r.length as f64).ln(), (r.max_output as f64).ln())).collect();
    let slope = if bounded || points.len() < 2 { 0.0 } else { slope(&points) };
    Ok(GrowthEstimate { function: f.id().to_string(), rows, slope, bounded })
}

/// Parses `a:b:step` or a comma-separated list.
pub fn parse_lengths(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad length list `{s}`; expected `from:to:step` or `n1,n2,...`"));
    let nums = |parts: Vec<&str>| parts.iter().map(|p| p.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<Vec<_>>>();
    if s.contains(':') {
        match nums(s.split(':').collect())?.as_slice() {
            [a, b, step] if *step > 0 && a <= b => Ok((*a..=*b).step_by(*step).collect()),
            [a, b] if a <= b => Ok((*a..=*b).collect()),
            _ => Err(bad()),
        }
    } else {
        let v = nums(s.split(',').collect())?;
        if v.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad());
        }
        Ok(v)
    }
}

// Agreement -------------------------------------------------------------

/// Every word of length `≤ max_len`, then `random` seeded words with
/// length uniform in `0..=random_max_len`.
pub fn agreement_inputs(alphabet: &Alphabet, max_len: usize, random: usize, random_max_len: usize, seed: u64) -> Vec<Word> {
    let letters: Vec<Symbol> = alphabet.iter().cloned().collect();
    let mut words = all_words(alphabet, max_len);
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..random {
        let n = rng.gen_range(0..=random_max_len);
        words.push(Word((0..n).map(|_| letters[rng.gen_range(0..letters.len())].clone()).collect()));
    }
    words
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub input: String,
    /// `(function id, output)` for every function.
    pub outputs: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub functions: Vec<String>,
    pub checked: usize,
    /// The first disagreeing input in input order.
    pub disagreement: Option<Disagreement>,
}

/// Runs every function on every input and reports the first input where
/// the outputs are not all equal.
pub fn agreement(fs: &[Function], inputs: &[Word], exec: Execution) -> Result<AgreementReport> {
    let outs = par::try_map(exec, inputs, |w| {
        let outs = fs.iter().map(|f| f.apply(w)).collect::<Result<Vec<_>>>()?;
        Ok::<_, Error>(outs.windows(2).any(|p| p[0] != p[1]).then_some(outs))
    })?;
    let disagreement = inputs.iter().zip(outs).find_map(|(w, o)| {
        o.map(|o| Disagreement {
            input: render(w),
            outputs: fs.iter().zip(o).map(|(f, v)| (f.id().to_string(), render(&v))).collect(),
        })
    });
    Ok(AgreementReport { functions: fs.iter().map(|f| f.id().to_string()).collect(), checked: inputs.len(), disagreement })
}
