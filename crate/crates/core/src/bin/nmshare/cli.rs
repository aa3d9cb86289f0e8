use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use nmshare::cyclotomic::{self, ConstructionParams, ScedfSearch, KNOWN_ROWS};
use nmshare::diff_family::{verify_cedf, verify_scedf, verify_sedf};
use nmshare::formats::{parse_family, parse_scheme, read_input, ShareFile};
use nmshare::games::{
    additive_relation_attack, estimate_win_probability, exact_win_probability,
    shamir_offset_attack, Adversary, EncodedOffset, Relation,
};
use nmshare::{AmdCode, Error, Ratio, Recovery, Result, SharingScheme};

#[derive(Parser, Debug)]
#[command(name = "nmshare", version, about = "Tamper-resistant threshold secret sharing toolkit")]
pub struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Worker threads for searches and simulations.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a family against a difference-family identity.
    Verify(VerifyArgs),
    /// Build the cyclotomic family for q = m l^2 + 1 and a primitive root.
    Construct {
        q: u64,
        m: usize,
        l: usize,
        alpha: u64,
    },
    /// List the primitive roots whose cyclotomic family is a 1-CEDF, or with --shifts,
    /// the orderings of the classes that form an S-EDF.
    Search(SearchArgs),
    /// Re-verify every built-in known-good parameter set.
    Table1,
    /// Exhaustive strong circular family search over Z_n for n <= n_max.
    ScedfSearch {
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        c: usize,
        /// Cap on leaves visited plus subtrees pruned.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Exact adversary advantage of the AMD code on a family.
    Advantage {
        family: String,
        /// weak, strong, circular-weak:C or circular-strong:C
        #[arg(long, default_value = "weak")]
        game: String,
    },
    /// Share a secret.
    Deal {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        secret: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Reconstruct from the first k shares of a share file.
    Recover {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        shares: String,
    },
    /// Exact and simulated win probability of a tampering adversary.
    AttackDemo(AttackArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Family JSON, inline or a path.
    family: String,
    /// Circular shift for the c-CEDF identity (the default, with c = 1).
    #[arg(long, group = "mode")]
    cedf: Option<usize>,
    /// Comma-separated shift set for the S-EDF identity.
    #[arg(long, group = "mode", value_delimiter = ',')]
    sedf: Option<Vec<usize>>,
    /// Circular shift for the per-pair strong identity.
    #[arg(long, group = "mode")]
    scedf: Option<usize>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    q: u64,
    m: usize,
    l: usize,
    /// Comma-separated shift set; searches class orderings for an S-EDF.
    #[arg(long, value_delimiter = ',')]
    shifts: Option<Vec<usize>>,
    /// Random orderings to try instead of all of them.
    #[arg(long, requires = "seed")]
    restarts: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct AttackArgs {
    #[arg(long)]
    scheme: String,
    /// neq, shift:C or set:C1,C2
    #[arg(long, default_value = "neq")]
    relation: String,
    /// Number of controlled shares.
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// best (the optimal interpolated offset), offset:D (add D to one share),
    /// relation:C (move the secret by C) or encoded:D (move the interpolated value by D).
    #[arg(long, default_value = "best")]
    adversary: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
}

pub enum Outcome {
    Success,
    Failed,
}

impl Outcome {
    fn from_check(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::Failed
        }
    }
}

#[derive(Serialize)]
struct Frac {
    num: u64,
    den: u64,
}

impl From<Ratio> for Frac {
    fn from(r: Ratio) -> Self {
        Frac { num: *r.numer(), den: *r.denom() }
    }
}

fn parse_shift(text: &str) -> Result<usize> {
    text.parse()
        .map_err(|_| Error::Parse(format!("expected a shift, got {text:?}")))
}

impl Cli {
    fn emit<T: Serialize>(&self, value: &T) -> Result<()> {
        let text = if self.pretty {
            serde_json::to_string_pretty(value)?
        } else {
            serde_json::to_string(value)?
        };
        println!("{text}");
        Ok(())
    }

    pub fn run(&self) -> Result<Outcome> {
        match &self.command {
            Command::Verify(args) => self.verify(args),
            Command::Construct { q, m, l, alpha } => {
                let family = cyclotomic::cyclotomic_family(&ConstructionParams::new(*q, *m, *l, *alpha)?)?;
                self.emit(&family)?;
                Ok(Outcome::Success)
            }
            Command::Search(args) => self.search(args),
            Command::Table1 => self.table1(),
            Command::ScedfSearch { n_max, m, l, c, budget } => {
                let cert = cyclotomic::search_scedf(ScedfSearch {
                    n_max: *n_max,
                    m: *m,
                    l: *l,
                    c: *c,
                    budget: *budget,
                })?;
                let consistent = cert.is_consistent();
                self.emit(&json!({ "certificate": cert, "consistent": consistent }))?;
                Ok(Outcome::from_check(consistent && cert.conclusive))
            }
            Command::Advantage { family, game } => self.advantage(family, game),
            Command::Deal { scheme, secret, seed } => {
                let scheme = parse_scheme(&read_input(scheme)?)?;
                let shares = scheme.share(*secret, &mut ChaCha8Rng::seed_from_u64(*seed))?;
                self.emit(&ShareFile::from_vector(&shares))?;
                Ok(Outcome::Success)
            }
            Command::Recover { scheme, shares } => {
                let scheme = parse_scheme(&read_input(scheme)?)?;
                let file: ShareFile = serde_json::from_str(&read_input(shares)?)?;
                let (params, shares) = file.decode()?;
                if &params != scheme.params() {
                    return Err(Error::InvalidParams("share file parameters differ from the scheme".into()));
                }
                let outcome = scheme.recover(&shares)?;
                self.emit(&json!({ "outcome": outcome }))?;
                Ok(Outcome::from_check(matches!(outcome, Recovery::Secret(_))))
            }
            Command::AttackDemo(args) => self.attack_demo(args),
        }
    }

    fn verify(&self, args: &VerifyArgs) -> Result<Outcome> {
        let family = parse_family(&read_input(&args.family)?)?;
        let (mode, report) = if let Some(shifts) = &args.sedf {
            (json!({ "mode": "sedf", "shifts": shifts }), verify_sedf(&family, shifts)?)
        } else if let Some(c) = args.scedf {
            (json!({ "mode": "scedf", "c": c }), verify_scedf(&family, c)?)
        } else {
            let c = args.cedf.unwrap_or(1);
            (json!({ "mode": "cedf", "c": c }), verify_cedf(&family, c)?)
        };
        let mut out = mode;
        if let (Value::Object(out), Value::Object(r)) = (&mut out, serde_json::to_value(&report)?) {
            out.extend(r);
        }
        self.emit(&out)?;
        Ok(Outcome::from_check(report.valid))
    }

    fn search(&self, args: &SearchArgs) -> Result<Outcome> {
        let SearchArgs { q, m, l, .. } = *args;
        let Some(shifts) = &args.shifts else {
            let result = cyclotomic::search_parameter_set(q, m, l)?;
            self.emit(&result)?;
            return Ok(Outcome::Success);
        };
        let families = match (args.restarts, args.seed) {
            (Some(restarts), Some(seed)) => cyclotomic::search_sedf_random(q, m, l, shifts, restarts, seed)?,
            _ => cyclotomic::search_sedf_permutations(q, m, l, shifts)?,
        };
        self.emit(&json!({ "q": q, "m": m, "l": l, "shifts": shifts, "families": families }))?;
        Ok(Outcome::Success)
    }

    fn table1(&self) -> Result<Outcome> {
        let mut passed = 0;
        for row in KNOWN_ROWS {
            let family = cyclotomic::cyclotomic_family(&ConstructionParams::new(row.p, row.m, row.l, row.alpha)?)?;
            let report = verify_cedf(&family, 1)?;
            let pass = report.valid && report.lambda == Some(1);
            passed += pass as usize;
            self.emit(&json!({ "p": row.p, "m": row.m, "l": row.l, "alpha": row.alpha, "pass": pass, "lambda": report.lambda }))?;
        }
        self.emit(&json!({ "rows": KNOWN_ROWS.len(), "passed": passed }))?;
        Ok(Outcome::from_check(passed == KNOWN_ROWS.len()))
    }

    fn advantage(&self, family: &str, game: &str) -> Result<Outcome> {
        let code = AmdCode::new(parse_family(&read_input(family)?)?);
        let (report, optimal) = match game.split_once(':') {
            None if game == "weak" => (code.weak_advantage(), code.is_r_optimal_weak()),
            None if game == "strong" => (code.strong_advantage(), false),
            Some(("circular-weak", c)) => {
                let c = parse_shift(c)?;
                (code.circular_weak_advantage(c)?, code.is_r_optimal_circular(c)?)
            }
            Some(("circular-strong", c)) => (code.circular_strong_advantage(parse_shift(c)?)?, false),
            _ => return Err(Error::Parse(format!("unknown game {game:?}"))),
        };
        let bound = match game {
            "weak" => Some(code.weak_bound()),
            g if g.starts_with("circular-weak") => Some(code.circular_bound()),
            _ => None,
        };
        let mut out = serde_json::to_value(&report)?;
        if let (Value::Object(out), Some(bound)) = (&mut out, bound) {
            out.insert("bound".into(), serde_json::to_value(Frac::from(bound))?);
            out.insert("r_optimal".into(), optimal.into());
        }
        self.emit(&out)?;
        Ok(Outcome::Success)
    }

    fn attack_demo(&self, args: &AttackArgs) -> Result<Outcome> {
        let scheme = parse_scheme(&read_input(&args.scheme)?)?;
        let relation = Relation::parse(&args.relation, scheme.secret_count())?;
        let exact = exact_win_probability(&scheme, &relation, args.t)?;
        let field = scheme.params().field();
        let number = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad adversary {:?}", args.adversary)));
        let adversary: Box<dyn Adversary> = match args.adversary.split_once(':') {
            None if args.adversary == "best" => Box::new(EncodedOffset::new(exact.best_deltas[0])),
            Some(("offset", d)) => Box::new(shamir_offset_attack(field.elem(number(d)?))?),
            Some(("relation", c)) => Box::new(additive_relation_attack(number(c)?)?),
            Some(("encoded", d)) => Box::new(EncodedOffset::new(number(d)? % field.modulus())),
            _ => return Err(Error::Parse(format!("unknown adversary {:?}", args.adversary))),
        };
        let estimate = estimate_win_probability(&scheme, &relation, adversary.as_ref(), args.t, args.trials, args.seed)?;
        self.emit(&json!({
            "game": exact.game,
            "scheme": scheme.name(),
            "relation": relation.label(),
            "t": args.t,
            "adversary": args.adversary,
            "exact": Frac::from(exact.epsilon),
            "empirical": Frac { num: estimate.wins, den: estimate.trials },
            "trials": args.trials,
            "seed": args.seed,
            "best_deltas": exact.best_deltas,
        }))?;
        Ok(Outcome::Success)
    }
}
