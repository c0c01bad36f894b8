//! Coherent information of quantum channels stored as symbolic
//! superoperators, plus a catalog of atomic channels.

pub mod chanfile;
pub mod channels;
pub mod cohinfo;
pub mod numkit;
pub mod qstate;
pub mod random;
pub mod superop;
pub mod sweep;
pub mod verify;
