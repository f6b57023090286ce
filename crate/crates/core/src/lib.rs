pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod fw_amm;
pub mod fw_normal;
pub mod grid;
pub mod landau;
