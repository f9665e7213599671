use crate::error::{Error, Result};

/// Quasi-classical Gaussian packet of the slow system.
///
/// `width` is the position-space standard deviation `a`: the amplitude is
/// `exp(-(x - center)^2 / (4 a^2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub momentum: f64,
    pub width: f64,
    pub mass: f64,
}

impl GaussianPacket {
    pub fn new(center: f64, momentum: f64, width: f64, mass: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::param("width", "must be positive"));
        }
        if !(mass > 0.0) {
            return Err(Error::param("mass", "must be positive"));
        }
        Ok(Self { center, momentum, width, mass })
    }

    /// Packet at rest at the origin.
    pub fn at_rest(width: f64, mass: f64) -> Result<Self> {
        Self::new(0.0, 0.0, width, mass)
    }
}

/// Width of the freely spreading packet, `a sqrt(1 + t^2 / (4 M^2 a^4))`.
pub fn free_packet_width(packet: &GaussianPacket, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::param("t", "time must be non-negative"));
    }
    Ok(spread_width(packet.width, packet.mass, t))
}

pub(crate) fn spread_width(a: f64, mass: f64, t: f64) -> f64 {
    let r = t / (2.0 * mass * a * a);
    a * r.hypot(1.0)
}
