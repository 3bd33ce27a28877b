//! `start:stop:step` grids (inclusive of `stop` within half a step) and
//! single values.

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{p}` is not a finite number"))
        };
        match parts.as_slice() {
            [v] => Ok(Grid(vec![num(v)?])),
            [start, stop, step] => {
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if !(step > 0.0) {
                    return Err("grid step must be positive".into());
                }
                if stop < start {
                    return Err("grid stop must not be below start".into());
                }
                let count = ((stop - start) / step + 0.5).floor() as usize;
                if count > 1_000_000 {
                    return Err("grid has more than a million points".into());
                }
                Ok(Grid((0..=count).map(|i| start + i as f64 * step).collect()))
            }
            _ => Err(format!("`{s}` is neither a number nor start:stop:step")),
        }
    }
}
