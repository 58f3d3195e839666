pub mod image;
pub mod jones;
pub mod laurent;
pub mod morse;
pub mod pd;
pub mod pipeline;
pub mod random;
pub mod table;
