//! Measurements on generated graphs.

pub mod community;
pub mod concentration;
pub mod degree;
pub mod diameter;
pub mod tree;

pub use community::{median, CommunityCriteria, CommunityReport, ExpanderScan, RadiusScan, ScanEntry, SpatialView};
pub use concentration::{concentration_report, target_mass, ConcentrationReport, ConcentrationRow};
pub use degree::{analytic_fk, degree_histogram, fit_power_law_exponent, DegreeHistogram, PowerLawFit};
pub use diameter::{connected_components, diameter, DiameterMode, DiameterReport};
pub use tree::{urt_stats, TreeEdges, TreeStats};
