//! Job configuration: JSON in, validated and exact out.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use thiserror::Error;

use hypmirror_core::arrangement::RawData;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{pointer}: {message}")]
pub struct ConfigError {
    /// JSON pointer of the offending value.
    pub pointer: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Check,
    Circuits,
    Chambers,
    Strata,
    Mirror,
    Atlas,
    Verify,
    Multiplicative,
    Periods,
}

impl Task {
    pub const ALL: [Task; 9] = [
        Task::Check,
        Task::Circuits,
        Task::Chambers,
        Task::Strata,
        Task::Mirror,
        Task::Atlas,
        Task::Verify,
        Task::Multiplicative,
        Task::Periods,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Check => "check",
            Task::Circuits => "circuits",
            Task::Chambers => "chambers",
            Task::Strata => "strata",
            Task::Mirror => "mirror",
            Task::Atlas => "atlas",
            Task::Verify => "verify",
            Task::Multiplicative => "multiplicative",
            Task::Periods => "periods",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown task \"{s}\""))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum KahlerMode {
    #[default]
    Formal,
    /// Kähler variable name → value in `(0, 1)`.
    Numeric(BTreeMap<String, BigRational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputBlock {
    pub d: usize,
    pub u: Vec<Vec<BigInt>>,
    pub lambda_r: Vec<BigRational>,
    pub tropical: Option<Vec<BigRational>>,
    pub complex: Option<Vec<(BigRational, BigRational)>>,
    pub kahler: KahlerMode,
}

impl InputBlock {
    pub fn raw(&self) -> RawData {
        let trop = match (&self.tropical, &self.complex) {
            (Some(t), _) => t.clone(),
            (None, Some(c)) => c.iter().map(|(re, _)| re.clone()).collect(),
            (None, None) => unreachable!("validated"),
        };
        let raw = RawData::new(self.d, self.u.clone(), self.lambda_r.clone(), trop);
        match &self.complex {
            Some(c) => raw.with_complex(c.clone()),
            None => raw,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OutputOptions {
    pub dir: Option<PathBuf>,
    pub svg: bool,
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    pub margin: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 480,
            height: 480,
            margin: 24,
        }
    }
}

/// Deliberate corruptions for negative controls.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Faults {
    /// Chamber transitions whose wall exponents are negated.
    pub flip_delta: Vec<usize>,
    /// 1-based coordinates whose sign in `φ(u_i)` is negated.
    pub phi_sign: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobConfig {
    pub input: InputBlock,
    pub tasks: Vec<Task>,
    pub output: OutputOptions,
    pub render: RenderOptions,
    pub faults: Faults,
}

fn child(pointer: &str, key: &str) -> String {
    format!("{pointer}/{}", key.replace('~', "~0").replace('/', "~1"))
}

fn object<'a>(
    v: &'a Value,
    pointer: &str,
) -> Result<&'a serde_json::Map<String, Value>, ConfigError> {
    v.as_object()
        .ok_or_else(|| ConfigError::new(pointer, "expected an object"))
}

fn array<'a>(v: &'a Value, pointer: &str) -> Result<&'a Vec<Value>, ConfigError> {
    v.as_array()
        .ok_or_else(|| ConfigError::new(pointer, "expected an array"))
}

fn required<'a>(
    obj: &'a serde_json::Map<String, Value>,
    key: &str,
    pointer: &str,
) -> Result<&'a Value, ConfigError> {
    obj.get(key)
        .ok_or_else(|| ConfigError::new(child(pointer, key), "required field is missing"))
}

fn reject_unknown(
    obj: &serde_json::Map<String, Value>,
    allowed: &[&str],
    pointer: &str,
) -> Result<(), ConfigError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::new(child(pointer, k), "unknown field")),
        None => Ok(()),
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if !digits(int_part) || !digits(frac_part) {
        return None;
    }
    let numer = BigInt::from_str(&format!("0{int_part}{frac_part}")).ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(numer, denom);
    Some(if negative { -r } else { r })
}

/// An exact rational: a JSON integer, an `[p, q]` integer pair, or a string `"p/q"` or decimal.
pub fn parse_rational(v: &Value, pointer: &str) -> Result<BigRational, ConfigError> {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => Ok(BigRational::from_integer(i.into())),
            (None, Some(u)) => Ok(BigRational::from_integer(u.into())),
            _ => Err(ConfigError::new(
                pointer,
                format!("non-exact numeric literal {n}; use a decimal string or an integer pair"),
            )),
        },
        Value::Array(pair) if pair.len() == 2 => {
            let p = parse_integer(&pair[0], &child(pointer, "0"))?;
            let q = parse_integer(&pair[1], &child(pointer, "1"))?;
            if q.is_zero() {
                return Err(ConfigError::new(child(pointer, "1"), "zero denominator"));
            }
            Ok(BigRational::new(p, q))
        }
        Value::String(s) => {
            let s = s.trim();
            if let Some((p, q)) = s.split_once('/') {
                let p = BigInt::from_str(p.trim())
                    .map_err(|_| ConfigError::new(pointer, "bad numerator"))?;
                let q = BigInt::from_str(q.trim())
                    .map_err(|_| ConfigError::new(pointer, "bad denominator"))?;
                if q.is_zero() {
                    return Err(ConfigError::new(pointer, "zero denominator"));
                }
                return Ok(BigRational::new(p, q));
            }
            parse_decimal(s).ok_or_else(|| {
                ConfigError::new(pointer, format!("cannot read \"{s}\" as a rational"))
            })
        }
        _ => Err(ConfigError::new(pointer, "expected a rational number")),
    }
}

pub fn parse_integer(v: &Value, pointer: &str) -> Result<BigInt, ConfigError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| ConfigError::new(pointer, "expected an integer")),
        Value::String(s) => {
            BigInt::from_str(s.trim()).map_err(|_| ConfigError::new(pointer, "expected an integer"))
        }
        _ => Err(ConfigError::new(pointer, "expected an integer")),
    }
}

fn parse_rationals(v: &Value, pointer: &str, n: usize) -> Result<Vec<BigRational>, ConfigError> {
    let items = array(v, pointer)?;
    if items.len() != n {
        return Err(ConfigError::new(
            pointer,
            format!("expected {n} entries, found {}", items.len()),
        ));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| parse_rational(x, &child(pointer, &i.to_string())))
        .collect()
}

fn parse_usize(v: &Value, pointer: &str) -> Result<usize, ConfigError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| ConfigError::new(pointer, "expected a nonnegative integer"))
}

fn parse_bool(v: &Value, pointer: &str) -> Result<bool, ConfigError> {
    v.as_bool()
        .ok_or_else(|| ConfigError::new(pointer, "expected a boolean"))
}

fn parse_input(v: &Value) -> Result<InputBlock, ConfigError> {
    let p = "/input";
    let obj = object(v, p)?;
    reject_unknown(
        obj,
        &["d", "n", "u", "lambdaR", "tropical", "complex", "kahler"],
        p,
    )?;
    let d = parse_usize(required(obj, "d", p)?, &child(p, "d"))?;
    if d == 0 {
        return Err(ConfigError::new(
            child(p, "d"),
            "dimension must be positive",
        ));
    }
    let up = child(p, "u");
    let rows = array(required(obj, "u", p)?, &up)?;
    let mut u = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let rp = child(&up, &i.to_string());
        let entries = array(row, &rp)?;
        if entries.len() != d {
            return Err(ConfigError::new(
                rp,
                format!("expected {d} entries, found {}", entries.len()),
            ));
        }
        let parsed = entries
            .iter()
            .enumerate()
            .map(|(k, x)| parse_integer(x, &child(&rp, &k.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        u.push(parsed);
    }
    let n = u.len();
    if let Some(nv) = obj.get("n") {
        let declared = parse_usize(nv, &child(p, "n"))?;
        if declared != n {
            return Err(ConfigError::new(
                child(p, "n"),
                format!("declared {declared} but u has {n} rows"),
            ));
        }
    }
    let lambda_r = parse_rationals(required(obj, "lambdaR", p)?, &child(p, "lambdaR"), n)?;
    let tropical = obj
        .get("tropical")
        .map(|t| parse_rationals(t, &child(p, "tropical"), n))
        .transpose()?;
    let complex = match obj.get("complex") {
        None => None,
        Some(c) => {
            let cp = child(p, "complex");
            let items = array(c, &cp)?;
            if items.len() != n {
                return Err(ConfigError::new(
                    cp,
                    format!("expected {n} entries, found {}", items.len()),
                ));
            }
            let mut out = Vec::with_capacity(n);
            for (i, item) in items.iter().enumerate() {
                let ip = child(&cp, &i.to_string());
                let pair = array(item, &ip)?;
                if pair.len() != 2 {
                    return Err(ConfigError::new(ip, "expected [re, im]"));
                }
                out.push((
                    parse_rational(&pair[0], &child(&ip, "0"))?,
                    parse_rational(&pair[1], &child(&ip, "1"))?,
                ));
            }
            Some(out)
        }
    };
    if tropical.is_none() && complex.is_none() {
        return Err(ConfigError::new(
            child(p, "tropical"),
            "either tropical or complex is required",
        ));
    }
    let kahler = match obj.get("kahler") {
        None => KahlerMode::Formal,
        Some(k) => parse_kahler(k, &child(p, "kahler"))?,
    };
    Ok(InputBlock {
        d,
        u,
        lambda_r,
        tropical,
        complex,
        kahler,
    })
}

fn parse_kahler(v: &Value, p: &str) -> Result<KahlerMode, ConfigError> {
    let obj = object(v, p)?;
    reject_unknown(obj, &["mode", "values"], p)?;
    let mode = required(obj, "mode", p)?
        .as_str()
        .ok_or_else(|| ConfigError::new(child(p, "mode"), "expected a string"))?;
    match mode {
        "formal" => Ok(KahlerMode::Formal),
        "numeric" => {
            let vp = child(p, "values");
            let values = object(required(obj, "values", p)?, &vp)?;
            let mut out = BTreeMap::new();
            for (name, x) in values {
                let xp = child(&vp, name);
                let q = parse_rational(x, &xp)?;
                if !q.is_positive() || q >= BigRational::one() {
                    return Err(ConfigError::new(xp, "Kähler values must lie in (0, 1)"));
                }
                out.insert(name.clone(), q);
            }
            Ok(KahlerMode::Numeric(out))
        }
        other => Err(ConfigError::new(
            child(p, "mode"),
            format!("unknown mode \"{other}\""),
        )),
    }
}

fn parse_indices(v: &Value, p: &str) -> Result<Vec<usize>, ConfigError> {
    array(v, p)?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_usize(x, &child(p, &i.to_string())))
        .collect()
}

pub fn parse_config(text: &str) -> Result<JobConfig, ConfigError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError::new("", format!("invalid JSON: {e}")))?;
    let obj = object(&root, "")?;
    reject_unknown(obj, &["input", "tasks", "output", "render", "faults"], "")?;
    let input = parse_input(required(obj, "input", "")?)?;
    let tasks = match obj.get("tasks") {
        None => Vec::new(),
        Some(t) => array(t, "/tasks")?
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let tp = child("/tasks", &i.to_string());
                x.as_str()
                    .ok_or_else(|| ConfigError::new(&tp, "expected a task name"))?
                    .parse::<Task>()
                    .map_err(|e| ConfigError::new(&tp, e))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let mut output = OutputOptions::default();
    if let Some(o) = obj.get("output") {
        let oo = object(o, "/output")?;
        reject_unknown(oo, &["dir", "svg", "format"], "/output")?;
        if let Some(dir) = oo.get("dir") {
            let s = dir
                .as_str()
                .ok_or_else(|| ConfigError::new("/output/dir", "expected a path string"))?;
            output.dir = Some(PathBuf::from(s));
        }
        if let Some(svg) = oo.get("svg") {
            output.svg = parse_bool(svg, "/output/svg")?;
        }
        if let Some(f) = oo.get("format") {
            output.format = match f.as_str() {
                Some("json") => Format::Json,
                Some("text") => Format::Text,
                _ => {
                    return Err(ConfigError::new(
                        "/output/format",
                        "expected \"json\" or \"text\"",
                    ))
                }
            };
        }
    }
    let mut render = RenderOptions::default();
    if let Some(r) = obj.get("render") {
        let ro = object(r, "/render")?;
        reject_unknown(ro, &["width", "height", "margin"], "/render")?;
        let dim = |key: &str, slot: &mut u32| -> Result<(), ConfigError> {
            if let Some(x) = ro.get(key) {
                let p = child("/render", key);
                let v = parse_usize(x, &p)?;
                *slot = u32::try_from(v).map_err(|_| ConfigError::new(&p, "too large"))?;
            }
            Ok(())
        };
        dim("width", &mut render.width)?;
        dim("height", &mut render.height)?;
        dim("margin", &mut render.margin)?;
        if 2 * render.margin >= render.width.min(render.height) {
            return Err(ConfigError::new(
                "/render/margin",
                "margin leaves no drawing area",
            ));
        }
    }
    let mut faults = Faults::default();
    if let Some(f) = obj.get("faults") {
        let fo = object(f, "/faults")?;
        reject_unknown(fo, &["flipDelta", "phiSign"], "/faults")?;
        if let Some(x) = fo.get("flipDelta") {
            faults.flip_delta = parse_indices(x, "/faults/flipDelta")?;
        }
        if let Some(x) = fo.get("phiSign") {
            faults.phi_sign = parse_indices(x, "/faults/phiSign")?;
        }
    }
    Ok(JobConfig {
        input,
        tasks,
        output,
        render,
        faults,
    })
}
