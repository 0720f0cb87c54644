//! Run configuration: parsing, defaults and conversion to library types.

use std::path::Path;

use hybrid_finger::beam::FingertipSection;
use hybrid_finger::cmaes::CmaEsConfig;
use hybrid_finger::defaults as d;
use hybrid_finger::design::{ObjectiveConfig, SamplingSpec};
use hybrid_finger::fivebar::{Branch, FingerChain, LinkageGeometry};
use hybrid_finger::hertz::{ContactScenario, Environment};
use hybrid_finger::material::shore_a_to_modulus;
use serde::{Deserialize, Serialize};

use crate::units::{Angle, Length, Modulus};

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchName {
    ElbowUp,
    ElbowDown,
}

impl From<BranchName> for Branch {
    fn from(b: BranchName) -> Branch {
        match b {
            BranchName::ElbowUp => Branch::ElbowUp,
            BranchName::ElbowDown => Branch::ElbowDown,
        }
    }
}

impl From<Branch> for BranchName {
    fn from(b: Branch) -> BranchName {
        match b {
            Branch::ElbowUp => BranchName::ElbowUp,
            Branch::ElbowDown => BranchName::ElbowDown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    Flat,
    Convex,
    Concave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SectionConfig {
    pub pulp_width: Length,
    pub pulp_height: Length,
    pub phalanx_width: Length,
    pub phalanx_height: Length,
    pub nail_thickness: Length,
    /// Either a modulus or a Shore A hardness; Shore 10A when both are absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulp_modulus: Option<Modulus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulp_shore_a: Option<f64>,
    pub phalanx_modulus: Modulus,
    pub nail_modulus: Modulus,
    pub proximal_length: Length,
    pub distal_length: Length,
}

impl Default for SectionConfig {
    fn default() -> Self {
        let s = d::fingertip_section();
        SectionConfig {
            pulp_width: Length(s.pulp_width),
            pulp_height: Length(s.pulp_height),
            phalanx_width: Length(s.phalanx_width),
            phalanx_height: Length(s.phalanx_height),
            nail_thickness: Length(s.nail_thickness),
            pulp_modulus: None,
            pulp_shore_a: None,
            phalanx_modulus: Modulus(s.phalanx_modulus),
            nail_modulus: Modulus(s.nail_modulus),
            proximal_length: Length(s.proximal_length),
            distal_length: Length(s.distal_length),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub pulp_radius: Length,
    pub pulp_poisson: f64,
    pub environment: EnvironmentKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub environment_radius: Option<Length>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            pulp_radius: Length(d::PULP_RADIUS),
            pulp_poisson: d::PULP_POISSON,
            environment: EnvironmentKind::Flat,
            environment_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionConfig {
    pub delta_total: Length,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            delta_total: Length(d::DELTA_TOTAL),
        }
    }
}

/// Log-spaced heatmap axes; the approach depth comes from `partition`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub nail_modulus: [Modulus; 2],
    pub pulp_modulus: [Modulus; 2],
    pub nail_points: usize,
    pub pulp_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            nail_modulus: [Modulus(d::SWEEP_NAIL_MODULUS.0), Modulus(d::SWEEP_NAIL_MODULUS.1)],
            pulp_modulus: [Modulus(d::SWEEP_PULP_MODULUS.0), Modulus(d::SWEEP_PULP_MODULUS.1)],
            nail_points: d::SWEEP_POINTS,
            pulp_points: d::SWEEP_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrendConfig {
    pub convex_radius: Length,
    pub concave_radius: Length,
}

impl Default for TrendConfig {
    fn default() -> Self {
        TrendConfig {
            convex_radius: Length(d::TREND_CONVEX_RADIUS),
            concave_radius: Length(d::TREND_CONCAVE_RADIUS),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkageConfig {
    pub lengths: [Length; 5],
    pub ground_angle: Angle,
}

impl Default for LinkageConfig {
    fn default() -> Self {
        LinkageConfig {
            lengths: d::REFERENCE_LINK_LENGTHS.map(Length),
            ground_angle: Angle(d::GROUND_ANGLE),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorkspaceConfig {
    pub phi1: [Angle; 2],
    pub phi2: [Angle; 2],
    pub resolution: usize,
    pub branch: BranchName,
    /// Defaults to the fourth linkage length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finger_proximal_length: Option<Length>,
    pub finger_distal_length: Length,
}

impl Default for WorkspaceConfig {
    fn default() -> Self {
        let s = d::workspace_sampling();
        WorkspaceConfig {
            phi1: [Angle(s.phi1.0), Angle(s.phi1.1)],
            phi2: [Angle(s.phi2.0), Angle(s.phi2.1)],
            resolution: s.resolution.0,
            branch: s.branch.into(),
            finger_proximal_length: None,
            finger_distal_length: Length(d::FINGER_DISTAL_LENGTH),
        }
    }
}

/// Linkage synthesis over `(L1, L3)`; the other lengths come from `linkage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObjectiveSection {
    pub weights: [f64; 4],
    pub lower: [Length; 2],
    pub upper: [Length; 2],
    pub phi1: [Angle; 2],
    pub phi2: [Angle; 2],
    pub resolution: usize,
    pub branch: BranchName,
    pub theta_target: Angle,
}

impl Default for ObjectiveSection {
    fn default() -> Self {
        let o = d::objective_config();
        ObjectiveSection {
            weights: o.weights,
            lower: o.lower.map(Length),
            upper: o.upper.map(Length),
            phi1: [Angle(o.sampling.phi1.0), Angle(o.sampling.phi1.1)],
            phi2: [Angle(o.sampling.phi2.0), Angle(o.sampling.phi2.1)],
            resolution: o.sampling.resolution.0,
            branch: o.sampling.branch.into(),
            theta_target: Angle(o.theta_target),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CmaesSection {
    pub population: usize,
    pub parents: usize,
    pub max_evaluations: usize,
    pub max_restarts: usize,
    /// Initial step size in design space; 20% of the widest bound by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_sigma: Option<Length>,
}

impl Default for CmaesSection {
    fn default() -> Self {
        let c = d::cma_es_config();
        CmaesSection {
            population: c.population,
            parents: c.parents,
            max_evaluations: c.max_evaluations,
            max_restarts: c.max_restarts,
            initial_sigma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub section: SectionConfig,
    pub scenario: ScenarioConfig,
    pub partition: PartitionConfig,
    pub sweep: SweepConfig,
    pub trend: TrendConfig,
    pub linkage: LinkageConfig,
    pub workspace: WorkspaceConfig,
    pub objective: ObjectiveSection,
    pub cmaes: CmaesSection,
}

pub enum Format {
    Json,
    Toml,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Format> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(Format::Json),
            Some("toml") => Ok(Format::Toml),
            _ => Err(ConfigError(format!(
                "{}: config must have a .json or .toml extension",
                path.display()
            ))),
        }
    }
}

pub fn parse_value<T: serde::de::DeserializeOwned>(text: &str, format: Format, origin: &str) -> Result<T> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(|e| ConfigError(format!("{origin}: {e}"))),
        Format::Toml => toml::from_str(text).map_err(|e| ConfigError(format!("{origin}: {e}"))),
    }
}

impl RunConfig {
    /// Fills every optional field with the value it stands for, so the
    /// serialized form no longer depends on defaults.
    pub fn resolve(mut self) -> Result<RunConfig> {
        let s = &mut self.section;
        let modulus = match (s.pulp_modulus, s.pulp_shore_a) {
            (Some(_), Some(_)) => {
                return Err(ConfigError(
                    "section: give either pulp_modulus or pulp_shore_a, not both".into(),
                ))
            }
            (Some(m), None) => m.0,
            (None, shore) => {
                let shore = shore.unwrap_or(d::PULP_SHORE_A);
                let m = shore_a_to_modulus(shore);
                if !m.is_finite() {
                    return Err(ConfigError(format!(
                        "section.pulp_shore_a: {shore} is outside the supported range [0, 100)"
                    )));
                }
                m
            }
        };
        s.pulp_modulus = Some(Modulus(modulus));
        s.pulp_shore_a = None;

        let sc = &mut self.scenario;
        match (sc.environment, sc.environment_radius) {
            (EnvironmentKind::Flat, _) => sc.environment_radius = None,
            (_, None) => {
                return Err(ConfigError(
                    "scenario.environment_radius is required for a curved environment".into(),
                ))
            }
            _ => {}
        }

        if self.workspace.finger_proximal_length.is_none() {
            self.workspace.finger_proximal_length = Some(self.linkage.lengths[3]);
        }
        if self.cmaes.initial_sigma.is_none() {
            let widest = (0..2)
                .map(|i| self.objective.upper[i].0 - self.objective.lower[i].0)
                .fold(0.0, f64::max);
            if widest > 0.0 {
                self.cmaes.initial_sigma = Some(Length(0.2 * widest));
            }
        }
        Ok(self)
    }

    fn pulp_modulus(&self) -> f64 {
        self.section
            .pulp_modulus
            .map(|m| m.0)
            .unwrap_or_else(|| shore_a_to_modulus(self.section.pulp_shore_a.unwrap_or(d::PULP_SHORE_A)))
    }

    pub fn fingertip_section(&self) -> FingertipSection {
        let s = &self.section;
        FingertipSection {
            pulp_width: s.pulp_width.0,
            pulp_height: s.pulp_height.0,
            phalanx_width: s.phalanx_width.0,
            phalanx_height: s.phalanx_height.0,
            nail_thickness: s.nail_thickness.0,
            pulp_modulus: self.pulp_modulus(),
            phalanx_modulus: s.phalanx_modulus.0,
            nail_modulus: s.nail_modulus.0,
            proximal_length: s.proximal_length.0,
            distal_length: s.distal_length.0,
        }
    }

    pub fn contact_scenario(&self) -> ContactScenario {
        let sc = &self.scenario;
        let radius = sc.environment_radius.map(|r| r.0).unwrap_or(f64::NAN);
        ContactScenario {
            pulp_radius: sc.pulp_radius.0,
            environment: match sc.environment {
                EnvironmentKind::Flat => Environment::Flat,
                EnvironmentKind::Convex => Environment::Convex(radius),
                EnvironmentKind::Concave => Environment::Concave(radius),
            },
            pulp_modulus: self.pulp_modulus(),
            pulp_poisson: sc.pulp_poisson,
        }
    }

    pub fn linkage_geometry(&self) -> LinkageGeometry {
        LinkageGeometry {
            lengths: self.linkage.lengths.map(|l| l.0),
            ground_angle: self.linkage.ground_angle.0,
        }
    }

    pub fn finger_chain(&self) -> FingerChain {
        FingerChain {
            proximal_length: self
                .workspace
                .finger_proximal_length
                .unwrap_or(self.linkage.lengths[3])
                .0,
            distal_length: self.workspace.finger_distal_length.0,
            base: (0.0, 0.0),
        }
    }

    pub fn workspace_sampling(&self) -> SamplingSpec {
        let w = &self.workspace;
        SamplingSpec {
            phi1: (w.phi1[0].0, w.phi1[1].0),
            phi2: (w.phi2[0].0, w.phi2[1].0),
            resolution: (w.resolution, w.resolution),
            branch: w.branch.into(),
        }
    }

    pub fn objective_config(&self) -> ObjectiveConfig {
        let o = &self.objective;
        let l = self.linkage.lengths;
        ObjectiveConfig {
            weights: o.weights,
            fixed_lengths: [l[1].0, l[3].0, l[4].0],
            ground_angle: self.linkage.ground_angle.0,
            lower: o.lower.map(|v| v.0),
            upper: o.upper.map(|v| v.0),
            sampling: SamplingSpec {
                phi1: (o.phi1[0].0, o.phi1[1].0),
                phi2: (o.phi2[0].0, o.phi2[1].0),
                resolution: (o.resolution, o.resolution),
                branch: o.branch.into(),
            },
            theta_target: o.theta_target.0,
        }
    }

    pub fn cma_es_config(&self) -> CmaEsConfig {
        let c = &self.cmaes;
        CmaEsConfig {
            population: c.population,
            parents: c.parents,
            max_evaluations: c.max_evaluations,
            max_restarts: c.max_restarts,
            initial_sigma: c.initial_sigma.map(|s| s.0),
            seed: self.seed,
            ..d::cma_es_config()
        }
    }
}
