//! `keypoly`: command-line front end for inductive valuations over (Q, v_p).
//!
//! Exit codes: 0 success, 1 usage or argument parse error, 2 invalid chain file,
//! 3 domain or resource error.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use keypoly::augment::{augment, limit_augment, Stability};
use keypoly::json::{chain_from_json, chain_to_json, family_from_json, value_to_json, FamilyInput};
use keypoly::keys::{classify_key, enumerate_keys, graded_factorization, lift_key, KeyVerdict};
use keypoly::{Error, HomogeneousUnit, InductiveValuation, Poly, Value};
use serde_json::{json, Map, Value as Json};

#[derive(Parser, Debug)]
#[command(
    name = "keypoly",
    version,
    about = "Inductive valuations, key polynomials and residual polynomials over (Q, v_p)"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Chain file (JSON); `stability` and `limit` take a continuous family file.
    #[arg(long)]
    chain: String,
    /// Emit {verb, inputs, result, diagnostics} as JSON.
    #[arg(long)]
    json: bool,
    /// Seed for randomized factoring and spot checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// mu(f)
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: String,
    },
    /// phi-expansion of f with the value of every term
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: String,
    },
    /// Residual polynomial R(f)
    Respoly {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: String,
    },
    /// s(f), s'(f), the normalized leading coefficient and R(f)
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: String,
    },
    /// Residual ideal of f
    Ideal {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: String,
    },
    /// Whether chi is a key polynomial, with the reason
    Iskey {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chi: String,
    },
    /// Key polynomial with residual polynomial psi ("y" gives the last key)
    Liftkey {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        psi: String,
    },
    /// One key per class with residual degree at most D
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        max_res_deg: usize,
    },
    /// Graded factorization of f
    Factor {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: String,
    },
    /// The chain augmented by (chi, gamma)
    Augment {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chi: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// v_chi(f) = mu(f mod chi) for a key chi
    Vchi {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chi: String,
        #[arg(long)]
        poly: String,
    },
    /// Stability of f along a continuous family
    Stability {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: String,
    },
    /// Value of f under the limit augmentation given in the family file
    Limit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: String,
        /// Overrides "limit_gamma" from the file.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        let code = match err {
            Error::Parse(_) => 1,
            Error::InvalidChain(_) => 2,
            Error::Domain(_) | Error::Resource(_) => 3,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

struct Output {
    text: String,
    result: Json,
    diagnostics: Vec<String>,
}

impl Output {
    fn new(text: impl Into<String>, result: Json) -> Output {
        Output {
            text: text.into(),
            result,
            diagnostics: Vec::new(),
        }
    }
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Eval { .. } => "eval",
            Verb::Expand { .. } => "expand",
            Verb::Respoly { .. } => "respoly",
            Verb::Decompose { .. } => "decompose",
            Verb::Ideal { .. } => "ideal",
            Verb::Iskey { .. } => "iskey",
            Verb::Liftkey { .. } => "liftkey",
            Verb::Enumerate { .. } => "enumerate",
            Verb::Factor { .. } => "factor",
            Verb::Augment { .. } => "augment",
            Verb::Vchi { .. } => "vchi",
            Verb::Stability { .. } => "stability",
            Verb::Limit { .. } => "limit",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Verb::Eval { common, .. }
            | Verb::Expand { common, .. }
            | Verb::Respoly { common, .. }
            | Verb::Decompose { common, .. }
            | Verb::Ideal { common, .. }
            | Verb::Iskey { common, .. }
            | Verb::Liftkey { common, .. }
            | Verb::Enumerate { common, .. }
            | Verb::Factor { common, .. }
            | Verb::Augment { common, .. }
            | Verb::Vchi { common, .. }
            | Verb::Stability { common, .. }
            | Verb::Limit { common, .. } => common,
        }
    }

    /// Arguments as given, in a fixed key order.
    fn inputs(&self) -> Json {
        let c = self.common();
        let mut m = Map::new();
        m.insert("chain".into(), json!(c.chain));
        let mut put = |k: &str, v: &str| {
            m.insert(k.into(), json!(v));
        };
        match self {
            Verb::Eval { poly, .. }
            | Verb::Expand { poly, .. }
            | Verb::Respoly { poly, .. }
            | Verb::Decompose { poly, .. }
            | Verb::Ideal { poly, .. }
            | Verb::Factor { poly, .. }
            | Verb::Stability { poly, .. } => put("poly", poly),
            Verb::Iskey { chi, .. } => put("chi", chi),
            Verb::Liftkey { psi, .. } => put("psi", psi),
            Verb::Enumerate { max_res_deg, .. } => put("max_res_deg", &max_res_deg.to_string()),
            Verb::Augment { chi, gamma, .. } => {
                put("chi", chi);
                put("gamma", gamma);
            }
            Verb::Vchi { chi, poly, .. } => {
                put("chi", chi);
                put("poly", poly);
            }
            Verb::Limit { poly, gamma, .. } => {
                put("poly", poly);
                if let Some(g) = gamma {
                    put("gamma", g);
                }
            }
        }
        m.insert("seed".into(), json!(c.seed));
        Json::Object(m)
    }
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("invalid chain: cannot read {path}: {e}"),
    })
}

fn load_chain(path: &str) -> Result<InductiveValuation, Failure> {
    Ok(chain_from_json(&read(path)?)?)
}

fn load_family(path: &str, seed: u64) -> Result<FamilyInput, Failure> {
    Ok(family_from_json(&read(path)?, seed)?)
}

fn arg_poly(name: &str, s: &str) -> Result<Poly, Failure> {
    s.parse().map_err(|e: Error| Failure {
        code: 1,
        message: format!("--{name}: {e}"),
    })
}

fn arg_value(name: &str, s: &str) -> Result<Value, Failure> {
    s.parse().map_err(|e: Error| Failure {
        code: 1,
        message: format!("--{name}: {e}"),
    })
}

fn unit_json(nu: &InductiveValuation, a: &HomogeneousUnit) -> Json {
    json!({"value": value_to_json(&a.value), "residue": nu.field().fmt_elem(&a.residue)})
}

fn run(verb: &Verb) -> Result<Output, Failure> {
    let c = verb.common();
    match verb {
        Verb::Stability { poly, .. } => {
            let fam = load_family(&c.chain, c.seed)?;
            let f = arg_poly("poly", poly)?;
            return Ok(match fam.chain.stability(&f)? {
                Stability::Stable { value, witness } => Output::new(
                    format!("stable: {value} from member {witness}"),
                    json!({"stable": true, "value": value_to_json(&value), "witness": witness}),
                ),
                Stability::UnstableWithinPrefix { values } => {
                    let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                    Output::new(
                        format!(
                            "unstable within {} members: {}",
                            values.len(),
                            shown.join(", ")
                        ),
                        json!({"stable": false, "values": values.iter().map(value_to_json).collect::<Vec<_>>()}),
                    )
                }
            });
        }
        Verb::Limit { poly, gamma, .. } => {
            let fam = load_family(&c.chain, c.seed)?;
            let f = arg_poly("poly", poly)?;
            let phi = fam.limit_phi.clone().ok_or_else(|| Failure {
                code: 2,
                message: "invalid chain: the family file has no \"limit_phi\"".into(),
            })?;
            let g = match gamma {
                Some(s) => Some(arg_value("gamma", s)?),
                None => fam.limit_gamma.clone(),
            };
            let lim = limit_augment(&fam.chain, &phi, g.as_ref(), c.seed)?;
            let v = lim.eval(&f)?;
            let mut out = Output::new(v.to_string(), json!({"value": value_to_json(&v)}));
            out.diagnostics.push(format!(
                "limit key {} with value {} over {} family members",
                lim.phi(),
                lim.gamma(),
                fam.chain.len()
            ));
            return Ok(out);
        }
        _ => {}
    }

    let nu = load_chain(&c.chain)?;
    let k = nu.field();
    let mut out = match verb {
        Verb::Eval { poly, .. } => {
            let v = nu.mu(&arg_poly("poly", poly)?);
            Output::new(v.to_string(), value_to_json(&v))
        }
        Verb::Expand { poly, .. } => {
            let f = arg_poly("poly", poly)?;
            let rep = nu.expansion(&f)?;
            let mut lines = vec![format!("phi = {}", nu.phi())];
            for (s, (a, v)) in rep.coeffs.iter().zip(&rep.monomial_values).enumerate() {
                if !a.is_zero() {
                    lines.push(format!("s = {s}: {a}  (value {v})"));
                }
            }
            let argmin: Vec<String> = rep.argmin.iter().map(|s| s.to_string()).collect();
            lines.push(format!(
                "mu = {}, argmin = {{{}}}, s = {}, s' = {}",
                rep.mu,
                argmin.join(", "),
                rep.s,
                rep.s_prime
            ));
            Output::new(
                lines.join("\n"),
                json!({
                    "phi": nu.phi().to_string(),
                    "coefficients": rep.coeffs.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    "values": rep.monomial_values.iter().map(value_to_json).collect::<Vec<_>>(),
                    "mu": value_to_json(&rep.mu),
                    "argmin": rep.argmin,
                    "s": rep.s,
                    "s_prime": rep.s_prime,
                }),
            )
        }
        Verb::Respoly { poly, .. } => {
            let r = nu.residual_poly(&arg_poly("poly", poly)?)?;
            Output::new(k.show(&r), json!({"residual_polynomial": k.show(&r)}))
        }
        Verb::Decompose { poly, .. } => {
            let d = nu.hmu_decompose(&arg_poly("poly", poly)?)?;
            Output::new(
                format!(
                    "s = {}, s' = {}, nlc = {}, R = {}",
                    d.s,
                    d.s_prime,
                    nu.fmt_unit(&d.nlc),
                    k.show(&d.r)
                ),
                json!({
                    "s": d.s,
                    "s_prime": d.s_prime,
                    "nlc": unit_json(&nu, &d.nlc),
                    "residual_polynomial": k.show(&d.r),
                }),
            )
        }
        Verb::Ideal { poly, .. } => {
            let i = nu.residual_ideal(&arg_poly("poly", poly)?)?;
            Output::new(
                nu.fmt_ideal(&i),
                json!({"xi_power": i.xi_power, "psi": k.show(&i.psi)}),
            )
        }
        Verb::Iskey { chi, .. } => {
            let chi = arg_poly("chi", chi)?;
            let (key, reason, r) = match classify_key(&nu, &chi)? {
                KeyVerdict::EquivalentToPhi => {
                    (true, "equivalent to the last key".to_string(), None)
                }
                KeyVerdict::Incommensurable => (
                    true,
                    "same degree as the last key and mu(chi - phi) exceeds its value".to_string(),
                    None,
                ),
                KeyVerdict::Residual(r) => (
                    true,
                    format!(
                        "s(chi) = 0 and R(chi) = {} is irreducible of the right degree",
                        k.show(&r)
                    ),
                    Some(k.show(&r)),
                ),
                KeyVerdict::NotKey(reason) => (false, reason, None),
            };
            Output::new(
                format!("{key}: {reason}"),
                json!({"key": key, "reason": reason, "residual_polynomial": r}),
            )
        }
        Verb::Liftkey { psi, .. } => {
            let psi = k.parse_poly(psi).map_err(|e| Failure {
                code: 1,
                message: format!("--psi: {e}"),
            })?;
            let chi = lift_key(&nu, &psi)?;
            Output::new(chi.to_string(), json!({"chi": chi.to_string()}))
        }
        Verb::Enumerate { max_res_deg, .. } => {
            let keys = enumerate_keys(&nu, *max_res_deg)?;
            let mut lines = Vec::new();
            let mut items = Vec::new();
            for chi in &keys {
                let ideal = if nu.is_commensurable() {
                    nu.fmt_ideal(&nu.residual_ideal(chi)?)
                } else {
                    "xi".to_string()
                };
                lines.push(format!("{chi}  [degree {}, ideal {ideal}]", chi.deg()));
                items.push(json!({"chi": chi.to_string(), "degree": chi.deg(), "ideal": ideal}));
            }
            let mut out = Output::new(lines.join("\n"), json!({"keys": items}));
            out.diagnostics.push(format!("residue field {k}"));
            out
        }
        Verb::Factor { poly, .. } => {
            let f = arg_poly("poly", poly)?;
            let gf = graded_factorization(&nu, &f, c.seed)?;
            let factors: Vec<Json> = gf
                .factors
                .iter()
                .map(|(chi, a)| {
                    json!({"chi": chi.to_string(), "multiplicity": a, "value": value_to_json(&nu.mu(chi))})
                })
                .collect();
            Output::new(
                format!("{}\n{}", gf.render(&nu), gf.accounting(&nu)),
                json!({
                    "unit": unit_json(&nu, &gf.unit),
                    "factors": factors,
                    "accounting": gf.accounting(&nu),
                }),
            )
        }
        Verb::Augment { chi, gamma, .. } => {
            let chi = arg_poly("chi", chi)?;
            let gamma = arg_value("gamma", gamma)?;
            let aug = augment(&nu, &chi, &gamma)?;
            let mut out = Output::new(aug.to_string(), chain_to_json(&aug));
            if aug.len() == nu.len() {
                out.diagnostics
                    .push("the new key replaces the last step".into());
            }
            out
        }
        Verb::Vchi { chi, poly, .. } => {
            let chi = arg_poly("chi", chi)?;
            let v = nu.semivaluation_vchi(&chi, &arg_poly("poly", poly)?)?;
            Output::new(v.to_string(), value_to_json(&v))
        }
        Verb::Stability { .. } | Verb::Limit { .. } => unreachable!(),
    };
    out.diagnostics.insert(0, format!("chain {nu}"));
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let verb = &cli.verb;
    let json_mode = verb.common().json;
    match run(verb) {
        Ok(out) => {
            if json_mode {
                let doc = json!({
                    "verb": verb.name(),
                    "inputs": verb.inputs(),
                    "result": out.result,
                    "diagnostics": out.diagnostics,
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                println!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(fail) => {
            if json_mode {
                let doc = json!({
                    "verb": verb.name(),
                    "inputs": verb.inputs(),
                    "result": Json::Null,
                    "diagnostics": [fail.message.clone()],
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            }
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}
