//! Layered fingernail / pulp / distal-phalanx cantilever.
//!
//! The fingertip is an Euler-Bernoulli cantilever of length `L = L1 + L2`.
//! Over the proximal segment the cross-section holds the pulp, the embedded
//! phalanx and the nail; over the distal segment the phalanx is gone but its
//! cavity is still cut out of the pulp (the phalanx modulus is simply set to
//! zero). Heights are measured from the bottom (contact) face of the pulp:
//! the phalanx cavity sits against the top of the pulp and the nail is
//! bonded on top of that.

use crate::error::{ModelError, Result};

/// Cross-section geometry and moduli of the fingertip. SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingertipSection {
    pub pulp_width: f64,
    pub pulp_height: f64,
    pub phalanx_width: f64,
    pub phalanx_height: f64,
    /// Zero encodes a fingertip without a nail.
    pub nail_thickness: f64,
    pub pulp_modulus: f64,
    pub phalanx_modulus: f64,
    pub nail_modulus: f64,
    /// Length of the segment containing the phalanx.
    pub proximal_length: f64,
    /// Length of the pulp + nail overhang beyond the phalanx.
    pub distal_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Proximal,
    Distal,
}

/// Areas, centroids, neutral axis and flexural rigidity of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionProperties {
    pub pulp_area: f64,
    pub phalanx_area: f64,
    pub nail_area: f64,
    /// Centroid of the solid pulp rectangle before the cavity is removed.
    pub gross_centroid: f64,
    pub void_centroid: f64,
    pub nail_centroid: f64,
    /// Centroid of the pulp with the cavity removed.
    pub pulp_centroid: f64,
    pub neutral_axis: f64,
    pub flexural_rigidity: f64,
}

impl FingertipSection {
    pub fn total_length(&self) -> f64 {
        self.proximal_length + self.distal_length
    }

    pub fn total_height(&self) -> f64 {
        self.pulp_height + self.nail_thickness
    }

    /// Same section with the nail removed.
    pub fn without_nail(&self) -> Self {
        FingertipSection {
            nail_thickness: 0.0,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("pulp_width", self.pulp_width),
            ("pulp_height", self.pulp_height),
            ("phalanx_width", self.phalanx_width),
            ("phalanx_height", self.phalanx_height),
            ("nail_thickness", self.nail_thickness),
            ("pulp_modulus", self.pulp_modulus),
            ("phalanx_modulus", self.phalanx_modulus),
            ("nail_modulus", self.nail_modulus),
            ("proximal_length", self.proximal_length),
            ("distal_length", self.distal_length),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(ModelError::InvalidSection(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.pulp_width <= 0.0 || self.pulp_height <= 0.0 {
            return Err(ModelError::InvalidSection(
                "pulp width and height must be positive".into(),
            ));
        }
        if self.pulp_modulus <= 0.0 {
            return Err(ModelError::InvalidSection("pulp modulus must be positive".into()));
        }
        if self.phalanx_height >= self.pulp_height || self.phalanx_width > self.pulp_width {
            return Err(ModelError::InvalidSection(
                "phalanx cavity must fit inside the pulp cross-section".into(),
            ));
        }
        if self.total_length() <= 0.0 {
            return Err(ModelError::InvalidSection("beam length must be positive".into()));
        }
        Ok(())
    }
}

/// Composite section properties of `segment` via the parallel axis theorem.
pub fn section_properties(section: &FingertipSection, segment: Segment) -> Result<SectionProperties> {
    section.validate()?;
    let s = section;
    let phalanx_modulus = match segment {
        Segment::Proximal => s.phalanx_modulus,
        Segment::Distal => 0.0,
    };

    let gross_area = s.pulp_width * s.pulp_height;
    let void_area = s.phalanx_width * s.phalanx_height;
    let pulp_area = gross_area - void_area;
    let phalanx_area = void_area;
    let nail_area = s.pulp_width * s.nail_thickness;

    let gross_centroid = s.pulp_height / 2.0;
    let void_centroid = s.pulp_height - s.phalanx_height / 2.0;
    let nail_centroid = s.pulp_height + s.nail_thickness / 2.0;
    let pulp_centroid = (gross_area * gross_centroid - void_area * void_centroid) / pulp_area;

    let weighted_area =
        s.pulp_modulus * pulp_area + phalanx_modulus * phalanx_area + s.nail_modulus * nail_area;
    if weighted_area <= 0.0 {
        return Err(ModelError::DegenerateSection);
    }
    let neutral_axis = (s.pulp_modulus * pulp_area * pulp_centroid
        + phalanx_modulus * phalanx_area * void_centroid
        + s.nail_modulus * nail_area * nail_centroid)
        / weighted_area;

    let void_own = s.phalanx_width * s.phalanx_height.powi(3) / 12.0;
    let pulp_own = (s.pulp_width * s.pulp_height.powi(3) / 12.0
        + gross_area * (gross_centroid - pulp_centroid).powi(2))
        - (void_own + void_area * (void_centroid - pulp_centroid).powi(2));
    let nail_own = s.pulp_width * s.nail_thickness.powi(3) / 12.0;

    let flexural_rigidity = s.pulp_modulus
        * (pulp_own + pulp_area * (pulp_centroid - neutral_axis).powi(2))
        + phalanx_modulus * (void_own + phalanx_area * (void_centroid - neutral_axis).powi(2))
        + s.nail_modulus * (nail_own + nail_area * (nail_centroid - neutral_axis).powi(2));

    Ok(SectionProperties {
        pulp_area,
        phalanx_area,
        nail_area,
        gross_centroid,
        void_centroid,
        nail_centroid,
        pulp_centroid,
        neutral_axis,
        flexural_rigidity,
    })
}

/// Uniform rigidity storing the same tip-load strain energy as the
/// two-segment beam: `L^3 / ((L^3 - L2^3)/EI1 + L2^3/EI2)`.
pub fn effective_rigidity(ei_proximal: f64, ei_distal: f64, proximal_length: f64, distal_length: f64) -> f64 {
    let l3 = (proximal_length + distal_length).powi(3);
    let d3 = distal_length.powi(3);
    l3 / ((l3 - d3) / ei_proximal + d3 / ei_distal)
}

/// Effective rigidity of a whole fingertip section.
pub fn section_effective_rigidity(section: &FingertipSection) -> Result<f64> {
    let ei1 = section_properties(section, Segment::Proximal)?.flexural_rigidity;
    let ei2 = section_properties(section, Segment::Distal)?.flexural_rigidity;
    Ok(effective_rigidity(
        ei1,
        ei2,
        section.proximal_length,
        section.distal_length,
    ))
}

/// Tip stiffness `3 EI / L^3` of a uniform cantilever.
pub fn tip_stiffness(ei_eff: f64, length: f64) -> f64 {
    3.0 * ei_eff / length.powi(3)
}

/// Bending strain energy `(1/2) (3 EI / L^3) delta_b^2`.
pub fn bending_energy(ei_eff: f64, length: f64, delta_b: f64) -> f64 {
    0.5 * tip_stiffness(ei_eff, length) * delta_b * delta_b
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rectangle() -> FingertipSection {
        FingertipSection {
            pulp_width: 1.0,
            pulp_height: 1.0,
            phalanx_width: 0.0,
            phalanx_height: 0.0,
            nail_thickness: 0.0,
            pulp_modulus: 1.0,
            phalanx_modulus: 0.0,
            nail_modulus: 0.0,
            proximal_length: 1.0,
            distal_length: 0.0,
        }
    }

    #[test]
    fn homogeneous_rectangle() {
        let p = section_properties(&rectangle(), Segment::Proximal).unwrap();
        assert_relative_eq!(p.neutral_axis, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.flexural_rigidity, 1.0 / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn matching_nail_is_material_continuity() {
        let h = 0.3;
        let s = FingertipSection {
            nail_thickness: h,
            nail_modulus: 1.0,
            ..rectangle()
        };
        let p = section_properties(&s, Segment::Proximal).unwrap();
        assert_relative_eq!(p.flexural_rigidity, (1.0_f64 + h).powi(3) / 12.0, max_relative = 1e-14);
        assert_relative_eq!(p.neutral_axis, (1.0 + h) / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn zero_thickness_nail_is_inert() {
        let base = crate::defaults::fingertip_section();
        let no_nail = base.without_nail();
        let softer = FingertipSection {
            nail_modulus: 0.0,
            ..no_nail
        };
        for seg in [Segment::Proximal, Segment::Distal] {
            let a = section_properties(&no_nail, seg).unwrap();
            let b = section_properties(&softer, seg).unwrap();
            assert_eq!(a.flexural_rigidity, b.flexural_rigidity);
        }
    }

    #[test]
    fn distal_segment_drops_phalanx_but_keeps_cavity() {
        let s = crate::defaults::fingertip_section();
        let prox = section_properties(&s, Segment::Proximal).unwrap();
        let dist = section_properties(&s, Segment::Distal).unwrap();
        assert_eq!(prox.pulp_area, dist.pulp_area);
        assert!(prox.flexural_rigidity > dist.flexural_rigidity);
    }

    #[test]
    fn invalid_sections_are_rejected() {
        let s = FingertipSection {
            phalanx_height: 1.0,
            phalanx_width: 0.5,
            ..rectangle()
        };
        assert!(matches!(
            section_properties(&s, Segment::Proximal),
            Err(ModelError::InvalidSection(_))
        ));
        let s = FingertipSection {
            pulp_modulus: 0.0,
            ..rectangle()
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn effective_rigidity_examples() {
        assert_relative_eq!(effective_rigidity(5.0, 5.0, 0.3, 0.7), 5.0, max_relative = 1e-15);
        assert_eq!(effective_rigidity(3.0, 1.0, 1.0, 0.0), 3.0);
        // 1 / ((1 - 0.125)/2 + 0.125)
        assert_relative_eq!(effective_rigidity(2.0, 1.0, 0.5, 0.5), 16.0 / 9.0, max_relative = 1e-15);
    }

    #[test]
    fn bending_energy_examples() {
        assert_eq!(bending_energy(1.0, 1.0, 0.0), 0.0);
        assert_eq!(bending_energy(1.0, 1.0, 1.0), 1.5);
    }

    #[test]
    fn bending_energy_matches_tip_load_work() {
        // delta = F L^3 / (3 EI) and the stored energy equals F delta / 2.
        let (ei, l, f) = (0.07, 0.02_f64, 1.3);
        let delta = f * l.powi(3) / (3.0 * ei);
        assert_relative_eq!(bending_energy(ei, l, delta), 0.5 * f * delta, max_relative = 1e-14);
        assert_relative_eq!(
            2.0 * bending_energy(ei, l, delta) / (delta * delta),
            tip_stiffness(ei, l),
            max_relative = 1e-14
        );
    }
}
