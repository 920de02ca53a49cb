pub mod attention_demo;
pub mod estimate;
pub mod generate_network;
pub mod hopfield_cmd;
pub mod lambda_c;
pub mod preset;
pub mod simulate;
pub mod sweep;
