use std::fmt::Write as _;
use std::io::Read as _;
use std::path::{Path, PathBuf};

use polyreg::func::{self, Function};
use polyreg::interp::{self, Interpretation};
use polyreg::langlab::{self, GrowthOptions, LanguageSample, PumpOutcome, DEFAULT_BUDGET, DEFAULT_PUMP_BUDGET};
use polyreg::logic::{check_sortable, SortOutcome};
use polyreg::par::Execution;
use polyreg::{pebble, psi, twoway, Alphabet, OriginWord, Word};
use serde_json::{json, Value};

use crate::{AgreeTarget, Cli, Command, Format};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(polyreg::Error),
}

impl CliError {
    /// 3 for failures while running a machine, 2 for everything the user
    /// can fix by changing the invocation or its files.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_evaluation_error() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<polyreg::Error> for CliError {
    fn from(e: polyreg::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Output {
    pub text: String,
    pub json: Value,
    /// `false` when a check ran to completion and failed.
    pub ok: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Output {
        Output { text, json, ok: true }
    }

    fn failed(mut self) -> Output {
        self.ok = false;
        self
    }

    pub fn print(&self, format: Format) {
        match format {
            Format::Text => print!("{}", self.text),
            Format::Json => println!("{}", serde_json::to_string_pretty(&self.json).expect("serializable")),
        }
    }
}

fn show(w: &Word) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.render()
    }
}

fn read_arg(arg: &str) -> Result<String> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s.trim_end_matches(['\n', '\r']).to_string())
    } else {
        Ok(arg.to_string())
    }
}

/// Tokenizes against `alphabet` when there is one, so multi-character
/// letters such as `♣1` need no spaces.
fn read_word(arg: &str, alphabet: Option<&Alphabet>) -> Result<Word> {
    let s = read_arg(arg)?;
    Ok(match alphabet {
        Some(a) => Word::parse_with(&s, a)?,
        None if s.trim() == "ε" => Word::empty(),
        None => Word::parse(s.trim()),
    })
}

fn origins_json(w: &OriginWord) -> Value {
    Value::Array(w.origins().map(|o| json!(o)).collect())
}

fn word_output(w: &OriginWord, origins: bool) -> (String, Value) {
    let text = if origins && !w.is_empty() { w.render() } else { show(&w.letters()) };
    let mut j = json!({ "output": show(&w.letters()) });
    if origins {
        j["origins"] = origins_json(w);
    }
    (text + "\n", j)
}

fn load_sample(p: &Path) -> Result<LanguageSample> {
    Ok(LanguageSample::parse_file(&std::fs::read_to_string(p)?)?)
}

fn write_interp(i: &Interpretation, out: Option<&Path>, what: &str) -> Result<Output> {
    let markers = json!(i.markers);
    let levels: Vec<String> = i.markers.iter().map(|m| format!("level {}: {} {} {}", m.level, m.club, m.boxed, m.diamond)).collect();
    match out {
        Some(p) if p != Path::new("-") => {
            std::fs::write(p, i.to_file_string())?;
            let mut text = format!("wrote {what} to {}\n", p.display());
            for l in &levels {
                writeln!(text, "  markers {l}").unwrap();
            }
            Ok(Output::new(text, json!({ "written": p.display().to_string(), "markers": markers })))
        }
        _ => Ok(Output::new(i.to_file_string(), json!({ "interpretation": i.to_file_string(), "markers": markers }))),
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::EvalInterp { interp, word, origins } => {
            let i = interp::load(interp)?;
            let w = read_word(word, Some(&i.input))?;
            let out = i.compile()?.eval(&w);
            let (text, mut j) = word_output(&out.word, *origins);
            if let Some(d) = &out.diagnostic {
                eprintln!("warning: output is not a word ({}); result is ε", serde_json::to_string(d).expect("serializable"));
            }
            j["diagnostic"] = json!(out.diagnostic);
            Ok(Output::new(text, j))
        }
        Command::EvalPebble { tree, word } => {
            let p = pebble::load(tree)?;
            let w = read_word(word, p.input_alphabet().as_ref())?;
            let out = p.apply(&w)?;
            let depth = p.depth();
            Ok(Output::new(format!("{}\n", show(&out)), json!({ "output": show(&out), "depth": depth })))
        }
        Command::Run2dft { machine, word, origins } => {
            let f = twoway::load(machine)?;
            let w = read_word(word, Some(f.input_alphabet()))?;
            let (text, j) = word_output(&f.run(&w)?, *origins);
            Ok(Output::new(text, j))
        }
        Command::Psi { interp, iterate, output } => {
            if *iterate == 0 {
                return Err(CliError::Usage("--iterate must be at least 1".into()));
            }
            let i = psi::iterate(&interp::load(interp)?, *iterate)?;
            write_interp(&i, output.as_deref(), "Ψ interpretation")
        }
        Command::Family { k, output } => {
            let i = psi::family(*k)?;
            let default = PathBuf::from(format!("I_{k}.interp"));
            write_interp(&i, Some(output.as_deref().unwrap_or(&default)), &format!("I_{k}"))
        }
        Command::Image { function, alphabet, max_len, output } => {
            let f = func::resolve(function)?;
            let a = Alphabet::parse(alphabet)?;
            let s = langlab::enumerate_image(&f, &a, *max_len, g.budget.unwrap_or(DEFAULT_BUDGET), Execution::Parallel)?;
            image_output(&s, output.as_deref())
        }
        Command::CheckDcomplete { prime, base, markers } => {
            let (prime, base) = (load_sample(prime)?, load_sample(base)?);
            let delta = if markers.trim().is_empty() { Alphabet::empty() } else { Alphabet::parse(markers)? };
            let r = langlab::check_dcomplete(&prime, &base, &delta, None, None);
            let mut text = String::new();
            for (name, d) in [("erasure", &r.erasure), ("delta", &r.delta)] {
                writeln!(text, "{name}: {} checked, {} passed, {} unknown, {} failed", d.checked, d.passed, d.unknown.len(), d.failures.len()).unwrap();
                for f in d.failures.iter().take(10) {
                    writeln!(text, "  fail {} (witness {}): {}", f.word, f.witness, f.reason).unwrap();
                }
                for f in d.unknown.iter().take(10) {
                    writeln!(text, "  unknown {} (witness {}): {}", f.word, f.witness, f.reason).unwrap();
                }
            }
            let verdict = match (r.passed(), r.conclusive()) {
                (false, _) => "FAILED",
                (true, true) => "passed",
                (true, false) => "passed with unknowns",
            };
            writeln!(text, "d-complete on samples: {verdict}").unwrap();
            let mut j = json!(r);
            j["passed"] = json!(r.passed());
            j["conclusive"] = json!(r.conclusive());
            let out = Output::new(text, j);
            Ok(if r.passed() { out } else { out.failed() })
        }
        Command::Pump { sample, word, k, big_k, extended } => {
            let s = load_sample(sample)?;
            let ext = match extended {
                Some(p) => load_sample(p)?,
                None => s.clone(),
            };
            let w = read_word(word, Some(&s.output_alphabet()))?;
            let outcome = langlab::pump_search(&s, &w, *k, *big_k, &ext, g.budget.unwrap_or(DEFAULT_PUMP_BUDGET))?;
            let text = match &outcome {
                PumpOutcome::Found { decomposition, candidates } => {
                    format!("found after {candidates} candidates: {}\n", decomposition.render())
                }
                PumpOutcome::None { reason, candidates } => format!("none after {candidates} candidates: {reason}\n"),
            };
            let out = Output::new(text, json!(outcome));
            Ok(if matches!(outcome, PumpOutcome::Found { .. }) { out } else { out.failed() })
        }
        Command::Growth { function, alphabet, lengths } => {
            let f = func::resolve(function)?;
            let a = Alphabet::parse(alphabet)?;
            let lengths = langlab::parse_lengths(lengths)?;
            let opts = GrowthOptions { seed: g.seed, ..GrowthOptions::default() };
            let e = langlab::growth_degree(&f, &a, &lengths, opts)?;
            let mut text = String::from("length\tmax_output\tsamples\tmode\n");
            for r in &e.rows {
                let mode = if r.exhaustive { "exhaustive" } else { "sampled" };
                writeln!(text, "{}\t{}\t{}\t{mode}", r.length, r.max_output, r.samples).unwrap();
            }
            if e.bounded {
                writeln!(text, "bounded output length").unwrap();
            } else {
                writeln!(text, "slope {:.3}", e.slope).unwrap();
            }
            Ok(Output::new(text, json!(e)))
        }
        Command::SortCheck { interp } => {
            let i = interp::load(interp)?;
            match check_sortable(&i)? {
                SortOutcome::Sortable(map) => {
                    let mut text = String::from("sortable\n");
                    for (label, vars) in &map {
                        let vs: Vec<String> = vars.iter().map(|(v, s)| format!("{v} ↦ {s}")).collect();
                        writeln!(text, "  {label}: {}", vs.join(", ")).unwrap();
                    }
                    Ok(Output::new(text, json!({ "sortable": true, "sorts": map })))
                }
                SortOutcome::Conflict(f) => {
                    let text = format!("not sortable: {} in {} compares sort 1 with sort 2\n", f.atom, f.formula);
                    Ok(Output::new(text, json!({ "sortable": false, "conflict": f })).failed())
                }
            }
        }
        Command::Agree { target: AgreeTarget::Innsq, max_len, random, random_max_len } => {
            let fs = [Function::innsq(), func::resolve("innsq-pebble")?, func::resolve("innsq-interp")?];
            let a = Alphabet::parse("a,b,#")?;
            let inputs = langlab::agreement_inputs(&a, *max_len, *random, *random_max_len, g.seed);
            let r = langlab::agreement(&fs, &inputs, Execution::Parallel)?;
            let names = r.functions.join(", ");
            let text = match &r.disagreement {
                None => format!("agree: {names} agree on {} inputs\n", r.checked),
                Some(d) => {
                    let outs: Vec<String> = d.outputs.iter().map(|(f, o)| format!("  {f}: {o}")).collect();
                    format!("DISAGREE on {}\n{}\n", d.input, outs.join("\n"))
                }
            };
            let out = Output::new(text, json!(r));
            Ok(if r.disagreement.is_none() { out } else { out.failed() })
        }
    }
}

fn image_output(s: &LanguageSample, out: Option<&Path>) -> Result<Output> {
    let words: Vec<Value> = s.words.iter().map(|(o, w)| json!({ "output": show(o), "witness": show(w) })).collect();
    let mut j = json!({
        "function": s.function,
        "max_len": s.max_len,
        "count": s.len(),
        "max_output_len": s.max_output_len,
        "words": words,
    });
    match out {
        Some(p) if p != Path::new("-") => {
            std::fs::write(p, s.to_file_string())?;
            j["written"] = json!(p.display().to_string());
            let text = format!("{} words, longest output {}, wrote {}\n", s.len(), s.max_output(), p.display());
            Ok(Output::new(text, j))
        }
        _ => Ok(Output::new(s.to_file_string(), j)),
    }
}
