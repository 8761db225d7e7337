use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::special::bessel_j_zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeFamily {
    HE,
    EH,
    TE,
    TM,
}

/// A spatial mode label such as HE12 or TE01.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeLabel {
    pub family: ModeFamily,
    pub azimuthal_order: u32,
    pub radial_order: u32,
}

impl ModeLabel {
    pub fn new(family: ModeFamily, azimuthal_order: u32, radial_order: u32) -> Result<Self> {
        if radial_order == 0 {
            return Err(Error::InvalidInput("radial order starts at 1".into()));
        }
        match family {
            ModeFamily::TE | ModeFamily::TM if azimuthal_order != 0 => Err(Error::InvalidInput(
                format!("{family:?} modes have azimuthal order 0, got {azimuthal_order}"),
            )),
            ModeFamily::HE | ModeFamily::EH if azimuthal_order == 0 => Err(Error::InvalidInput(
                format!("{family:?} modes have azimuthal order of at least 1"),
            )),
            _ => Ok(Self {
                family,
                azimuthal_order,
                radial_order,
            }),
        }
    }

    pub fn he(nu: u32, m: u32) -> Self {
        Self::new(ModeFamily::HE, nu, m).expect("valid HE label")
    }

    pub fn eh(nu: u32, m: u32) -> Self {
        Self::new(ModeFamily::EH, nu, m).expect("valid EH label")
    }

    pub fn te(m: u32) -> Self {
        Self::new(ModeFamily::TE, 0, m).expect("valid TE label")
    }

    pub fn tm(m: u32) -> Self {
        Self::new(ModeFamily::TM, 0, m).expect("valid TM label")
    }

    /// Bessel-zero constant `u` of the capillary model: `j_{ν−1,m}` for HE,
    /// `j_{ν+1,m}` for EH and `j_{1,m}` for TE and TM.
    pub fn capillary_constant(&self) -> f64 {
        let order = match self.family {
            ModeFamily::HE => self.azimuthal_order - 1,
            ModeFamily::EH => self.azimuthal_order + 1,
            ModeFamily::TE | ModeFamily::TM => 1,
        };
        bessel_j_zero(order, self.radial_order)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            ModeFamily::HE => "HE",
            ModeFamily::EH => "EH",
            ModeFamily::TE => "TE",
            ModeFamily::TM => "TM",
        };
        if self.azimuthal_order < 10 && self.radial_order < 10 {
            write!(f, "{fam}{}{}", self.azimuthal_order, self.radial_order)
        } else {
            write!(f, "{fam}{},{}", self.azimuthal_order, self.radial_order)
        }
    }
}

impl FromStr for ModeLabel {
    type Err = Error;

    /// Accepts `HE12`, `te01` or, for multi-digit orders, `HE10,3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("invalid mode label '{s}'"));
        if s.len() < 4 || !s.is_char_boundary(2) {
            return Err(bad());
        }
        let (fam, rest) = s.split_at(2);
        let family = match fam.to_ascii_uppercase().as_str() {
            "HE" => ModeFamily::HE,
            "EH" => ModeFamily::EH,
            "TE" => ModeFamily::TE,
            "TM" => ModeFamily::TM,
            _ => return Err(bad()),
        };
        let (nu, m) = if let Some((a, b)) = rest.split_once(',') {
            (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)
        } else if rest.len() == 2 && rest.bytes().all(|c| c.is_ascii_digit()) {
            let b = rest.as_bytes();
            ((b[0] - b'0') as u32, (b[1] - b'0') as u32)
        } else {
            return Err(bad());
        };
        ModeLabel::new(family, nu, m)
    }
}

impl Serialize for ModeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModeLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["HE11", "HE12", "EH21", "TE01", "TM02", "HE10,3"] {
            let l: ModeLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert_eq!("he13".parse::<ModeLabel>().unwrap(), ModeLabel::he(1, 3));
    }

    #[test]
    fn invalid_labels() {
        for s in ["TE11", "HE01", "HE10", "XX11", "HE1", "", "HE1x"] {
            assert!(s.parse::<ModeLabel>().is_err(), "{s}");
        }
    }

    #[test]
    fn capillary_constants() {
        assert!((ModeLabel::he(1, 1).capillary_constant() - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((ModeLabel::te(1).capillary_constant() - 3.831_705_970_207_512).abs() < 1e-12);
        assert!((ModeLabel::eh(1, 1).capillary_constant() - 5.135_622_301_840_683).abs() < 1e-12);
    }
}
