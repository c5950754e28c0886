//! Run configuration: flags, optional key=value file, and parsing of moduli and characters.

use std::collections::BTreeMap;
use std::path::Path;

use iwasawa_core::numberfield::{
    list_even_characters, make_field, parse_element, prime_ideals_above, ray_class_data, Character, FieldData,
    IdealHNF, RayClassData,
};
use iwasawa_core::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub d: Option<i64>,
    pub p: Option<u64>,
    pub n: Option<u32>,
    pub h: Option<u32>,
    pub ell: Option<u32>,
    pub f: Option<String>,
    pub chi: Option<String>,
    pub twist: Option<u64>,
    pub m: Vec<u32>,
    pub dedekind: bool,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Invalid(format!("bad value for {key}: '{v}'")))
}

impl RunConfig {
    /// Fill unset fields from a `key=value` file (`#` starts a comment).
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            kv.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        for (k, v) in kv {
            match k.as_str() {
                "d" => self.d = self.d.or(Some(parse_num(&k, &v)?)),
                "p" => self.p = self.p.or(Some(parse_num(&k, &v)?)),
                "n" => self.n = self.n.or(Some(parse_num(&k, &v)?)),
                "h" => self.h = self.h.or(Some(parse_num(&k, &v)?)),
                "ell" => self.ell = self.ell.or(Some(parse_num(&k, &v)?)),
                "f" => self.f = self.f.clone().or(Some(v)),
                "chi" => self.chi = self.chi.clone().or(Some(v)),
                "twist" => self.twist = self.twist.or(Some(parse_num(&k, &v)?)),
                "m" => {
                    if self.m.is_empty() {
                        self.m = v.split(',').map(|s| parse_num(&k, s)).collect::<Result<_>>()?;
                    }
                }
                "dedekind" => self.dedekind |= parse_num::<bool>(&k, &v)?,
                _ => return Err(Error::Invalid(format!("unknown config key '{k}'"))),
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Result<FieldData> {
        make_field(self.d.ok_or_else(|| Error::Invalid("--D is required".into()))?)
    }

    pub fn prime(&self) -> Result<u64> {
        self.p.ok_or_else(|| Error::Invalid("--p is required".into()))
    }
}

/// `f` as a product of generators separated by `;` (each `k`, `k*sqrtD`, or `a,b` for `a + bω`).
/// Without a spec: the product of the primes above `p` when given, else the unit ideal.
pub fn parse_modulus(field: &FieldData, spec: Option<&str>, p: Option<u64>) -> Result<IdealHNF> {
    match spec {
        Some(s) => {
            let mut f = IdealHNF::unit(field.n);
            for part in s.split(';') {
                let g = parse_element(field, part)?;
                if g.is_zero() || !g.is_integral() {
                    return Err(Error::Invalid(format!("modulus factor '{part}' must be a nonzero integer of K")));
                }
                f = f.mul(field, &IdealHNF::principal(field, &g));
            }
            Ok(f)
        }
        None => {
            let mut f = IdealHNF::unit(field.n);
            if let Some(p) = p {
                for pr in prime_ideals_above(field, p) {
                    f = f.mul(field, &pr);
                }
            }
            Ok(f)
        }
    }
}

/// `trivial`, `quad` (first nontrivial even quadratic character), `quad<g>` (one that factors
/// through the modulus generated by g), or a decimal index into the even characters of order
/// dividing `max_order`.
pub fn parse_character(
    field: &FieldData,
    rcd: &RayClassData,
    spec: Option<&str>,
    max_order: u64,
) -> Result<Character> {
    let spec = spec.unwrap_or("trivial").trim();
    if spec == "trivial" {
        return Ok(Character::trivial(rcd.len()));
    }
    if let Some(rest) = spec.strip_prefix("quad") {
        let quads = list_even_characters(rcd, 2).into_iter().filter(|c| c.order == 2);
        let through = if rest.is_empty() {
            None
        } else {
            let g = parse_modulus(field, Some(rest), None)?;
            if !rcd.modulus.is_subset(&g) {
                return Err(Error::Invalid(format!("{g} does not divide {}", rcd.modulus)));
            }
            Some(ray_class_data(field, &g)?)
        };
        for chi in quads {
            let ok = match &through {
                None => true,
                Some(rg) => (0..rcd.len()).all(|i| {
                    rg.class_of_element(field, &rcd.rep_gens[i]) != Some(rg.identity()) || chi.values[i] == 0
                }),
            };
            if ok {
                return Ok(chi);
            }
        }
        return Err(Error::Invalid(format!("no even quadratic character matches '{spec}'")));
    }
    let k: usize = parse_num("chi", spec)?;
    let all: Vec<Character> =
        list_even_characters(rcd, max_order).into_iter().filter(|c| max_order % c.order == 0).collect();
    all.get(k)
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("character index {k} out of range (0..{})", all.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_modulus_is_product_of_primes_above_p() {
        let k = make_field(5).unwrap();
        let f = parse_modulus(&k, None, Some(5)).unwrap();
        assert_eq!(f, parse_modulus(&k, Some("sqrt5"), None).unwrap());
        let f3 = parse_modulus(&k, None, Some(3)).unwrap();
        assert_eq!(f3, IdealHNF::from_int(&k, 3));
        assert_eq!(parse_modulus(&k, None, None).unwrap(), IdealHNF::unit(2));
        assert_eq!(parse_modulus(&k, Some("3;sqrt5"), None).unwrap(), parse_modulus(&k, Some("3*sqrt5"), None).unwrap());
        assert!(parse_modulus(&k, Some("0"), None).is_err());
    }

    #[test]
    fn character_selectors() {
        let k = make_field(5).unwrap();
        let rcd = ray_class_data(&k, &parse_modulus(&k, Some("3*sqrt5"), None).unwrap()).unwrap();
        assert!(parse_character(&k, &rcd, None, 2).unwrap().is_trivial());
        let q = parse_character(&k, &rcd, Some("quad"), 2).unwrap();
        assert_eq!(q.order, 2);
        assert_eq!(parse_character(&k, &rcd, Some("1"), 2).unwrap().values, vec![0, 0, 0, 0, 1, 1, 1, 1]);
        assert!(parse_character(&k, &rcd, Some("99"), 2).is_err());
        assert!(parse_character(&k, &rcd, Some("quad7"), 2).is_err());
    }

    #[test]
    fn file_values_yield_to_flags() {
        let path = std::env::temp_dir().join(format!("iwasawa-merge-{}.cfg", std::process::id()));
        std::fs::write(&path, "D=13\np = 3 # comment\nm=2,4\n\n").unwrap();
        let mut cfg = RunConfig { d: Some(5), ..Default::default() };
        cfg.merge_file(&path).unwrap();
        assert_eq!((cfg.d, cfg.p, cfg.m.clone()), (Some(5), Some(3), vec![2, 4]));
        std::fs::write(&path, "p\n").unwrap();
        assert!(RunConfig::default().merge_file(&path).is_err());
    }
}
