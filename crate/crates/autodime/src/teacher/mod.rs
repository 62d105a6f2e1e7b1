//! The environment-designing teacher: placement policy and intrinsic rewards.

pub mod policy;
pub mod reward;

pub use policy::{
    resolve_collision, SpawnMasks, TeacherConfig, TeacherLossStats, TeacherPolicy,
    TeacherTransition,
};
pub use reward::{
    aggregate_teacher_reward, pd_reward, teacher_reward, vd_reward, vpe_reward, TeacherRewardKind,
};
