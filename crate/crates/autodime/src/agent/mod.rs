//! Student learner: PPO with GAE, a two-member value ensemble, and a
//! behaviorally cloned shadow policy.

pub mod gae;
pub mod losses;
pub mod rollout;
pub mod student;
pub mod trajectory;

pub use gae::{compute_gae, GaeConfig};
pub use losses::{policy_entropy, ppo_policy_loss, value_loss, PpoConfig};
pub use rollout::collect_episode;
pub use student::{StudentBundle, StudentConfig, StudentLossStats};
pub use trajectory::Trajectory;
