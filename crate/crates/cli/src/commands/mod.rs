pub mod check_metric;
pub mod families;
pub mod lemmas;
pub mod scan;
