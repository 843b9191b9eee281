//! Hard limits and cost parameters of the hypothesis space.
//!
//! Parameter names double as ASP constant names and CLI flag names
//! (`maxvars` / `--maxvars`, `cost_negbodyliteral` / `--cost-negbodyliteral`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HardLimits {
    pub maxvars: u32,
    pub maxuseppred: u32,
    pub maxusenpred: u32,
    pub maxliterals: u32,
    pub maxinventpred: u32,
    pub inv_minarity: u32,
    pub inv_maxarity: u32,
}

impl Default for HardLimits {
    fn default() -> Self {
        HardLimits {
            maxvars: 4,
            maxuseppred: 2,
            maxusenpred: 2,
            maxliterals: 4,
            maxinventpred: 1,
            inv_minarity: 2,
            inv_maxarity: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostConfig {
    pub free_vars: i64,
    pub cost_vars: i64,
    pub cost_type_usedmorethantwice: i64,
    pub cost_posbodyliteral: i64,
    pub cost_negbodyliteral: i64,
    pub cost_pred_multi: i64,
    pub cost_varonlyhead: i64,
    pub cost_varonlyoncebody: i64,
    pub cost_var_boundmorethantwice: i64,
    pub cost_reflexive: i64,
    pub cost_inv: i64,
    pub cost_inv_pred: i64,
    pub cost_inv_headbody: i64,
    pub cost_inv_bodymulti: i64,
    pub cost_inv_headbodyorder: i64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            free_vars: 2,
            cost_vars: 1,
            cost_type_usedmorethantwice: 2,
            cost_posbodyliteral: 1,
            cost_negbodyliteral: 2,
            cost_pred_multi: 2,
            cost_varonlyhead: 5,
            cost_varonlyoncebody: 5,
            cost_var_boundmorethantwice: 2,
            cost_reflexive: 5,
            cost_inv: 2,
            cost_inv_pred: 2,
            cost_inv_headbody: 3,
            cost_inv_bodymulti: 5,
            cost_inv_headbodyorder: 5,
        }
    }
}

impl CostConfig {
    pub fn zero() -> Self {
        CostConfig {
            free_vars: 0,
            cost_vars: 0,
            cost_type_usedmorethantwice: 0,
            cost_posbodyliteral: 0,
            cost_negbodyliteral: 0,
            cost_pred_multi: 0,
            cost_varonlyhead: 0,
            cost_varonlyoncebody: 0,
            cost_var_boundmorethantwice: 0,
            cost_reflexive: 0,
            cost_inv: 0,
            cost_inv_pred: 0,
            cost_inv_headbody: 0,
            cost_inv_bodymulti: 0,
            cost_inv_headbodyorder: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown parameter `{0}`")]
    Unknown(String),
    #[error("parameter `{0}` must be non-negative, got {1}")]
    Negative(String, i64),
    #[error("inv_minarity ({0}) exceeds inv_maxarity ({1})")]
    InventionArity(u32, u32),
}

/// All hard-limit and cost parameters under their constant names.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceParams {
    pub limits: HardLimits,
    pub costs: CostConfig,
}

macro_rules! param_table {
    ($($group:ident . $field:ident : $ty:ty),* $(,)?) => {
        pub const PARAM_NAMES: &[&str] = &[$(stringify!($field)),*];

        impl SpaceParams {
            /// `(name, value)` for every parameter, limits first.
            pub fn entries(&self) -> Vec<(&'static str, i64)> {
                vec![$((stringify!($field), self.$group.$field as i64)),*]
            }

            pub fn set(&mut self, name: &str, value: i64) -> Result<(), ConfigError> {
                if value < 0 {
                    return Err(ConfigError::Negative(name.to_string(), value));
                }
                match name {
                    $(stringify!($field) => self.$group.$field = value as $ty,)*
                    _ => return Err(ConfigError::Unknown(name.to_string())),
                }
                Ok(())
            }
        }
    };
}

param_table! {
    limits.maxvars: u32,
    limits.maxuseppred: u32,
    limits.maxusenpred: u32,
    limits.maxliterals: u32,
    limits.maxinventpred: u32,
    limits.inv_minarity: u32,
    limits.inv_maxarity: u32,
    costs.free_vars: i64,
    costs.cost_vars: i64,
    costs.cost_type_usedmorethantwice: i64,
    costs.cost_posbodyliteral: i64,
    costs.cost_negbodyliteral: i64,
    costs.cost_pred_multi: i64,
    costs.cost_varonlyhead: i64,
    costs.cost_varonlyoncebody: i64,
    costs.cost_var_boundmorethantwice: i64,
    costs.cost_reflexive: i64,
    costs.cost_inv: i64,
    costs.cost_inv_pred: i64,
    costs.cost_inv_headbody: i64,
    costs.cost_inv_bodymulti: i64,
    costs.cost_inv_headbodyorder: i64,
}

impl SpaceParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let l = &self.limits;
        if l.inv_minarity > l.inv_maxarity {
            return Err(ConfigError::InventionArity(l.inv_minarity, l.inv_maxarity));
        }
        for (name, v) in self.entries() {
            if v < 0 {
                return Err(ConfigError::Negative(name.to_string(), v));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_two_parameters() {
        assert_eq!(PARAM_NAMES.len(), 22);
        assert_eq!(SpaceParams::default().entries().len(), 22);
    }

    #[test]
    fn set_by_name() {
        let mut p = SpaceParams::default();
        p.set("cost_negbodyliteral", 7).unwrap();
        p.set("maxvars", 3).unwrap();
        assert_eq!(p.costs.cost_negbodyliteral, 7);
        assert_eq!(p.limits.maxvars, 3);
        assert!(p.set("nope", 1).is_err());
        assert!(p.set("maxvars", -1).is_err());
    }

    #[test]
    fn invention_arity_order() {
        let mut p = SpaceParams::default();
        p.limits.inv_minarity = 3;
        assert!(p.validate().is_err());
    }
}
