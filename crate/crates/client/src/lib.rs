//! Thin async client for the bke HTTP service.
//!
//! ```no_run
//! # async fn run() -> Result<(), bke_client::ClientError> {
//! use bke_core::api::KeygenRequest;
//! use bke_core::Preset;
//!
//! let client = bke_client::Client::new("http://127.0.0.1:8080");
//! let keys = client
//!     .keygen(&KeygenRequest { preset: Preset::Toy17, seed: Some(1), self_test: false })
//!     .await?;
//! println!("{}", keys.public_fingerprint);
//! # Ok(())
//! # }
//! ```

use bke_core::api::{
    ApiError, BenchRequest, BenchResponse, DecryptRequest, DecryptResponse, EncryptRequest,
    EncryptResponse, ExpandRequest, ExpandResponse, FlowRequest, FlowResponse, Health,
    KeygenRequest, KeygenResponse,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    /// The service ran the request and rejected it.
    #[error(transparent)]
    Api(#[from] ApiError),
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("unexpected response ({status}): {body}")]
    Protocol { status: u16, body: String },
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Client {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    async fn decode<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T, ClientError> {
        let status = resp.status();
        let bytes = resp.bytes().await?;
        if status.is_success() {
            return serde_json::from_slice(&bytes).map_err(|e| ClientError::Protocol {
                status: status.as_u16(),
                body: e.to_string(),
            });
        }
        match serde_json::from_slice::<ApiError>(&bytes) {
            Ok(err) => Err(ClientError::Api(err)),
            Err(_) => Err(ClientError::Protocol {
                status: status.as_u16(),
                body: String::from_utf8_lossy(&bytes).into_owned(),
            }),
        }
    }

    async fn post<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        path: &str,
        req: &Req,
    ) -> Result<Resp, ClientError> {
        let resp = self
            .http
            .post(format!("{}{path}", self.base))
            .json(req)
            .send()
            .await?;
        Self::decode(resp).await
    }

    pub async fn health(&self) -> Result<Health, ClientError> {
        let resp = self.http.get(format!("{}/health", self.base)).send().await?;
        Self::decode(resp).await
    }

    pub async fn keygen(&self, req: &KeygenRequest) -> Result<KeygenResponse, ClientError> {
        self.post("/v1/keygen", req).await
    }

    pub async fn expand(&self, req: &ExpandRequest) -> Result<ExpandResponse, ClientError> {
        self.post("/v1/expand", req).await
    }

    pub async fn encrypt(&self, req: &EncryptRequest) -> Result<EncryptResponse, ClientError> {
        self.post("/v1/encrypt", req).await
    }

    pub async fn decrypt(&self, req: &DecryptRequest) -> Result<DecryptResponse, ClientError> {
        self.post("/v1/decrypt", req).await
    }

    pub async fn run_flow(&self, req: &FlowRequest) -> Result<FlowResponse, ClientError> {
        self.post("/v1/flows", req).await
    }

    pub async fn bench(&self, req: &BenchRequest) -> Result<BenchResponse, ClientError> {
        self.post("/v1/bench", req).await
    }
}
