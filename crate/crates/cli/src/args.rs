use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use paircorr_core::arith::{parse_rat, Rat};
use paircorr_core::paircorr::AlphaValue;
use paircorr_core::randmodel::RandomModelParams;
use paircorr_core::setcore::{GalleryKind, IntegerSet, SetSource};
use paircorr_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GalleryName {
    Interval,
    Squares,
    KthPowers,
    Primes,
    Lacunary,
}

/// Where the set `𝒜` comes from. Exactly one source must be given.
#[derive(Args, Debug, Clone)]
pub struct SetArgs {
    /// Named set.
    #[arg(long, value_enum)]
    pub gallery: Option<GalleryName>,
    /// Exponent for `kth-powers`.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Base for `lacunary`.
    #[arg(long, default_value_t = 2)]
    pub base: u64,
    /// File with a `# X=.. N=..` header and one integer per line.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Sample from the random model with exponent `--C`.
    #[arg(long)]
    pub random: bool,
    #[arg(long = "C", default_value_t = 3.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SetArgs {
    pub fn source(&self) -> anyhow::Result<SetSource> {
        let given = [self.gallery.is_some(), self.input.is_some(), self.random].iter().filter(|&&b| b).count();
        if given != 1 {
            return Err(Error::InvalidParameter("give exactly one of --gallery, --input, --random".into()).into());
        }
        if let Some(g) = self.gallery {
            let kind = match g {
                GalleryName::Interval => GalleryKind::Interval,
                GalleryName::Squares => GalleryKind::Squares,
                GalleryName::KthPowers => GalleryKind::KthPowers(self.k),
                GalleryName::Primes => GalleryKind::Primes,
                GalleryName::Lacunary => GalleryKind::Lacunary(self.base),
            };
            return Ok(SetSource::Gallery(kind));
        }
        if let Some(path) = &self.input {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(SetSource::Fixed(IntegerSet::from_text(&text)?));
        }
        Ok(SetSource::Random(RandomModelParams::new(self.c, self.seed)?))
    }

    pub fn set(&self, bound: u64) -> anyhow::Result<IntegerSet> {
        Ok(self.source()?.truncate(bound)?)
    }
}

/// Accepts plain integers, `2^k` and `1e6`.
pub fn parse_count(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let bad = || format!("not a natural number: {text:?}");
    if let Some((b, e)) = t.split_once('^') {
        let b: u64 = b.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        return b.checked_pow(e).ok_or_else(bad);
    }
    if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m: u64 = m.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        return 10u64.checked_pow(e).and_then(|p| p.checked_mul(m)).ok_or_else(bad);
    }
    t.parse().map_err(|_| bad())
}

pub fn parse_alpha(text: &str) -> Result<AlphaValue, String> {
    text.parse::<AlphaValue>().map_err(|e| e.to_string())
}

pub fn parse_s(text: &str) -> Result<Rat, String> {
    let r = parse_rat(text).map_err(|e| e.to_string())?;
    if *r.numer() == 0 {
        return Err("s must be positive".into());
    }
    Ok(r)
}

/// Audits run on exact arithmetic only.
pub fn exact_alpha(alpha: AlphaValue) -> anyhow::Result<AlphaValue> {
    if !alpha.is_exact() {
        bail!(Error::InvalidParameter("this command needs alpha as p/q".into()));
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("2^10"), Ok(1024));
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("17"), Ok(17));
        assert!(parse_count("2^99").is_err());
        assert!(parse_count("x").is_err());
    }
}
