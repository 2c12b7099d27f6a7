//! Plain finite-dimensional vector spaces over GF(2) or the rationals:
//! matrix morphisms with the partial trace, but no algebra modality.
//!
//! This is the ambient category the triviality obstruction speaks about;
//! the traced and additive suites run here directly.

use crate::dsl::{GenName, NormObj};
use crate::error::Error;
use crate::matrix::ExactMatrix;
use crate::model::MatrixBackend;
use crate::scalar::Domain;

#[derive(Debug, Clone, Copy)]
pub struct FvecModel {
    domain: Domain,
    dim: usize,
}

impl FvecModel {
    pub fn new(domain: Domain, dim: usize) -> FvecModel {
        assert!(
            domain != Domain::Boolean,
            "boolean matrices belong to the relation model"
        );
        FvecModel { domain, dim }
    }

    pub fn rational(dim: usize) -> FvecModel {
        FvecModel::new(Domain::Rational, dim)
    }

    pub fn gf2(dim: usize) -> FvecModel {
        FvecModel::new(Domain::Gf2, dim)
    }
}

impl MatrixBackend for FvecModel {
    fn model_id(&self) -> String {
        match self.domain {
            Domain::Rational => "fvec-q".to_string(),
            _ => format!("fvec-{}", self.domain),
        }
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn base_dim(&self) -> usize {
        self.dim
    }

    fn s_dim(&self, _inner_dim: u128) -> Result<u128, Error> {
        Err(Error::NoModality { model: self.model_id() })
    }

    fn gen_matrix(&self, _name: GenName, _at: &NormObj) -> Result<ExactMatrix, Error> {
        Err(Error::NoModality { model: self.model_id() })
    }

    fn s_lift(
        &self,
        _f: &ExactMatrix,
        _dom: &NormObj,
        _cod: &NormObj,
    ) -> Result<ExactMatrix, Error> {
        Err(Error::NoModality { model: self.model_id() })
    }
}
