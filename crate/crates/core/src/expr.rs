//! Parser for the small call-expression language used in configs and on the
//! command line, e.g. `product(rician(k=2), lognormal(sigma_db=4))`,
//! `mbmhaf(branches=[2,3], direct=true)` or `sas(alpha=1.6)`.

use crate::channels::ChannelModel;
use crate::error::{Error, Result};
use crate::metrics::MetricFunction;
use crate::noise::NoiseModel;
use crate::systems::TopologyKind;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Bool(bool),
    List(Vec<Value>),
    Call(Call),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Call {
    pub name: String,
    pub positional: Vec<Value>,
    pub named: Vec<(String, Value)>,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::InvalidParameter(format!(
            "{} at offset {} in `{}`",
            msg.into(),
            self.pos,
            self.src
        ))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let s = &self.src[start..self.pos];
        if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
            self.pos = start;
            None
        } else {
            Some(s.to_ascii_lowercase())
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                self.pos = start;
                self.err(format!("bad number `{text}`"))
            })
    }

    fn value(&mut self) -> Result<Value> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat(']') {
                    loop {
                        items.push(self.value()?);
                        if self.eat(']') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                Ok(Value::List(items))
            }
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                Ok(Value::Number(self.number()?))
            }
            _ => {
                let name = self.ident().ok_or_else(|| self.err("expected a value"))?;
                match name.as_str() {
                    "true" => return Ok(Value::Bool(true)),
                    "false" => return Ok(Value::Bool(false)),
                    _ => {}
                }
                let mut call = Call {
                    name,
                    positional: Vec::new(),
                    named: Vec::new(),
                };
                if self.eat('(') && !self.eat(')') {
                    loop {
                        let save = self.pos;
                        match self.ident() {
                            Some(key) if self.eat('=') => {
                                let v = self.value()?;
                                if call.named.iter().any(|(k, _)| *k == key) {
                                    return Err(self.err(format!("duplicate argument `{key}`")));
                                }
                                call.named.push((key, v));
                            }
                            _ => {
                                self.pos = save;
                                call.positional.push(self.value()?);
                            }
                        }
                        if self.eat(')') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                Ok(Value::Call(call))
            }
        }
    }
}

/// Parse one expression.
pub fn parse(src: &str) -> Result<Value> {
    let mut p = Parser { src, pos: 0 };
    let v = p.value()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

fn as_call(v: Value, what: &str) -> Result<Call> {
    match v {
        Value::Call(c) => Ok(c),
        other => Err(Error::InvalidParameter(format!("expected a {what}, got {other:?}"))),
    }
}

impl Call {
    /// Take the argument `key`, or the next positional one.
    fn take(&mut self, key: &str) -> Option<Value> {
        if let Some(i) = self.named.iter().position(|(k, _)| k == key) {
            return Some(self.named.remove(i).1);
        }
        if self.positional.is_empty() {
            None
        } else {
            Some(self.positional.remove(0))
        }
    }

    fn number(&mut self, keys: &[&str]) -> Result<f64> {
        let found = keys
            .iter()
            .find_map(|k| self.named.iter().position(|(n, _)| n == k));
        let v = match found {
            Some(i) => Some(self.named.remove(i).1),
            None if !self.positional.is_empty() => Some(self.positional.remove(0)),
            None => None,
        };
        match v {
            Some(Value::Number(x)) => Ok(x),
            Some(other) => Err(Error::InvalidParameter(format!(
                "{}: `{}` must be a number, got {other:?}",
                self.name, keys[0]
            ))),
            None => Err(Error::InvalidParameter(format!(
                "{}: missing argument `{}`",
                self.name, keys[0]
            ))),
        }
    }

    fn count(&mut self, keys: &[&str]) -> Result<usize> {
        let x = self.number(keys)?;
        if x < 0.0 || x.fract() != 0.0 || x > 1e6 {
            return Err(Error::InvalidParameter(format!(
                "{}: `{}` must be a non-negative integer, got {x}",
                self.name, keys[0]
            )));
        }
        Ok(x as usize)
    }

    fn finish(self) -> Result<()> {
        if let Some((k, _)) = self.named.first() {
            return Err(Error::InvalidParameter(format!("{}: unknown argument `{k}`", self.name)));
        }
        if !self.positional.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{}: too many arguments",
                self.name
            )));
        }
        Ok(())
    }
}

/// Parse a channel expression such as `rician(k=5)`.
pub fn parse_channel(src: &str) -> Result<ChannelModel> {
    channel_from(parse(src)?)
}

fn channel_from(v: Value) -> Result<ChannelModel> {
    let mut c = as_call(v, "channel model")?;
    let model = match c.name.as_str() {
        "rayleigh" => ChannelModel::Rayleigh,
        "rician" | "rice" => ChannelModel::rician(c.number(&["k"])?)?,
        "nakagami" | "gamma" => ChannelModel::nakagami(c.number(&["m"])?)?,
        "pareto" => ChannelModel::pareto(c.number(&["beta"])?)?,
        "lognormal" => ChannelModel::lognormal(c.number(&["sigma_db"])?)?,
        "product" => {
            let a = c.take("left").ok_or_else(|| Error::InvalidParameter("product: missing left factor".into()))?;
            let b = c.take("right").ok_or_else(|| Error::InvalidParameter("product: missing right factor".into()))?;
            ChannelModel::product(channel_from(a)?, channel_from(b)?)?
        }
        "scaled" => {
            let base = c.take("base").ok_or_else(|| Error::InvalidParameter("scaled: missing base".into()))?;
            let gain = c.number(&["gain"])?;
            ChannelModel::scaled(channel_from(base)?, gain)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown channel kind `{other}` (expected rayleigh, rician, nakagami, pareto, lognormal, product or scaled)"
            )))
        }
    };
    c.finish()?;
    Ok(model)
}

/// Parse a metric expression: `dpsk`, `bpsk`, `qfunc(a=1, b=2)`,
/// `mpsk(m=8)`, `mqam(m=16)` or `capacity`.
pub fn parse_metric(src: &str) -> Result<MetricFunction> {
    let mut c = as_call(parse(src)?, "metric")?;
    let m = match c.name.as_str() {
        "dpsk" => MetricFunction::Dpsk,
        "bpsk" => MetricFunction::BPSK,
        "qfunc" => {
            let a = c.number(&["a"])?;
            let b = c.number(&["b"])?;
            MetricFunction::a_q_sqrt_b(a, b)?
        }
        "mpsk" => MetricFunction::mpsk(c.count(&["m"])? as u32)?,
        "mqam" => MetricFunction::mqam(c.count(&["m"])? as u32)?,
        "capacity" => MetricFunction::Capacity,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown metric `{other}` (expected dpsk, bpsk, qfunc, mpsk, mqam or capacity)"
            )))
        }
    };
    c.finish()?;
    Ok(m)
}

/// Parse a topology: `mrc(3)`, `egc(m=3)`, `sc(3)`, `af(3)`, `df(3)`,
/// `pdc(3)` or `mbmhaf(branches=[2,3], direct=true)`.
pub fn parse_topology(src: &str) -> Result<TopologyKind> {
    let mut c = as_call(parse(src)?, "topology")?;
    let kind = match c.name.as_str() {
        "mrc" => TopologyKind::Mrc(c.count(&["m"])?),
        "egc" => TopologyKind::Egc(c.count(&["m"])?),
        "sc" => TopologyKind::Sc(c.count(&["m"])?),
        "af" | "mhaf" => TopologyKind::MultiHopAf(c.count(&["m", "hops"])?),
        "df" | "mhdf" => TopologyKind::MultiHopDf(c.count(&["m", "hops"])?),
        "pdc" => TopologyKind::Pdc(c.count(&["m"])?),
        "mbmhaf" => {
            let branches = match c.take("branches") {
                Some(Value::List(items)) => items
                    .into_iter()
                    .map(|v| match v {
                        Value::Number(x) if x >= 1.0 && x.fract() == 0.0 => Ok(x as usize),
                        other => Err(Error::InvalidParameter(format!(
                            "mbmhaf: hop counts must be positive integers, got {other:?}"
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?,
                _ => return Err(Error::InvalidParameter("mbmhaf: `branches` must be a list".into())),
            };
            let direct_link = match c.take("direct") {
                None => false,
                Some(Value::Bool(b)) => b,
                Some(other) => {
                    return Err(Error::InvalidParameter(format!(
                        "mbmhaf: `direct` must be true or false, got {other:?}"
                    )))
                }
            };
            TopologyKind::MbMhAf {
                branches,
                direct_link,
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown topology `{other}` (expected mrc, egc, sc, af, df, pdc or mbmhaf)"
            )))
        }
    };
    c.finish()?;
    kind.validate()?;
    Ok(kind)
}

/// Parse a noise model: `gaussian`, `sas(alpha=1.6)`,
/// `uniform(half_width=1.732)` or `compound(<channel>)`.
pub fn parse_noise(src: &str) -> Result<NoiseModel> {
    let mut c = as_call(parse(src)?, "noise model")?;
    let n = match c.name.as_str() {
        "gaussian" | "awgn" => NoiseModel::Gaussian,
        "sas" | "alpha_stable" => NoiseModel::alpha_stable(c.number(&["alpha"])?)?,
        "uniform" => NoiseModel::uniform(c.number(&["half_width", "c"])?)?,
        "compound" => {
            let mixing = c
                .take("mixing")
                .ok_or_else(|| Error::InvalidParameter("compound: missing mixing law".into()))?;
            NoiseModel::compound(channel_from(mixing)?)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown noise model `{other}` (expected gaussian, sas, uniform or compound)"
            )))
        }
    };
    c.finish()?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn channels() {
        assert_eq!(parse_channel("rician(k=2)").unwrap(), ChannelModel::Rician { k: 2.0 });
        assert_eq!(parse_channel(" Rician( 2 ) ").unwrap(), ChannelModel::Rician { k: 2.0 });
        assert_eq!(parse_channel("rayleigh").unwrap(), ChannelModel::Rayleigh);
        assert_eq!(
            parse_channel("product(rician(k=2), lognormal(sigma_db=4))").unwrap(),
            ChannelModel::product(ChannelModel::Rician { k: 2.0 }, ChannelModel::Lognormal { sigma_db: 4.0 }).unwrap()
        );
        assert_eq!(
            parse_channel("scaled(rayleigh, gain=2)").unwrap(),
            ChannelModel::scaled(ChannelModel::Rayleigh, 2.0).unwrap()
        );
        let e = parse_channel("rician(k=-1)").unwrap_err().to_string();
        assert!(e.contains("K >= 0"), "{e}");
        assert!(parse_channel("rician(q=1)").is_err());
        assert!(parse_channel("rician(k=1, k=2)").is_err());
        assert!(parse_channel("rician(k=1) x").is_err());
        assert!(parse_channel("point_mass(value=1)").is_err());
        assert!(parse_channel("nakagami()").is_err());
    }

    #[test]
    fn metrics_topologies_noise() {
        assert_eq!(parse_metric("bpsk").unwrap(), MetricFunction::BPSK);
        assert_eq!(parse_metric("mqam(m=16)").unwrap(), MetricFunction::Mqam { m: 16 });
        assert!(parse_metric("mqam(m=8)").is_err());
        assert!(parse_metric("mpsk(m=2.5)").is_err());
        assert_eq!(parse_topology("mrc(3)").unwrap(), TopologyKind::Mrc(3));
        assert_eq!(parse_topology("af(hops=3)").unwrap(), TopologyKind::MultiHopAf(3));
        assert_eq!(
            parse_topology("mbmhaf(branches=[2, 3], direct=true)").unwrap(),
            TopologyKind::MbMhAf { branches: vec![2, 3], direct_link: true }
        );
        assert!(parse_topology("pdc(4)").is_err());
        assert_eq!(parse_noise("sas(alpha=1.6)").unwrap(), NoiseModel::SymmetricAlphaStable { alpha: 1.6 });
        assert_eq!(parse_noise("uniform(c=2)").unwrap(), NoiseModel::UniformBounded { half_width: 2.0 });
        assert_eq!(
            parse_noise("compound(lognormal(sigma_db=3))").unwrap(),
            NoiseModel::CompoundGaussian { mixing: ChannelModel::Lognormal { sigma_db: 3.0 } }
        );
        assert!(parse_noise("sas(alpha=2.5)").is_err());
    }

    fn arb_channel() -> impl Strategy<Value = ChannelModel> {
        let leaf = prop_oneof![
            Just(ChannelModel::Rayleigh),
            (0.0f64..50.0).prop_map(|k| ChannelModel::Rician { k }),
            (0.5f64..50.0).prop_map(|m| ChannelModel::Nakagami { m }),
            (0.1f64..10.0).prop_map(|beta| ChannelModel::Pareto { beta }),
            (0.1f64..12.0).prop_map(|sigma_db| ChannelModel::Lognormal { sigma_db }),
        ];
        leaf.prop_recursive(3, 8, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| ChannelModel::Product(Box::new(a), Box::new(b))),
                (inner, 0.01f64..100.0).prop_map(|(base, gain)| ChannelModel::Scaled { base: Box::new(base), gain }),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(m in arb_channel()) {
            prop_assert_eq!(parse_channel(&m.to_string()).unwrap(), m);
        }
    }
}
