use bke_client::{Client, ClientError};
use bke_core::api::{
    BenchRequest, DecryptRequest, EncryptRequest, ErrorKind, ExpandRequest, FlowRequest, KeygenRequest,
};
use bke_core::bench::TableFormat;
use bke_core::protocol::FlowKind;
use bke_core::Preset;

async fn client() -> Client {
    let addr = bke_server::spawn(([127, 0, 0, 1], 0).into()).await.unwrap();
    Client::new(format!("http://{addr}/"))
}

#[tokio::test]
async fn expanded_key_roundtrip() {
    let c = client().await;
    assert_eq!(c.health().await.unwrap().status, "ok");
    let keys = c
        .keygen(&KeygenRequest {
            preset: Preset::Ntru509,
            seed: Some(1),
            self_test: false,
        })
        .await
        .unwrap();
    let w = c
        .expand(&ExpandRequest {
            key: keys.public_key.clone(),
            seed: Some(2),
            keep_secret: false,
            fixed_expander: None,
        })
        .await
        .unwrap();
    assert_eq!(w.depth, 1);
    assert!(w.expander.is_none());
    let plaintext = b"pseudonym batch 7".to_vec();
    let ct = c
        .encrypt(&EncryptRequest {
            key: w.expanded_key,
            plaintext: plaintext.clone(),
            seed: None,
        })
        .await
        .unwrap();
    let pt = c
        .decrypt(&DecryptRequest {
            private_key: keys.private_key,
            ciphertext: ct.ciphertext,
        })
        .await
        .unwrap();
    assert_eq!(pt.plaintext, plaintext);
}

#[tokio::test]
async fn api_errors_keep_their_kind() {
    let c = client().await;
    let err = c
        .decrypt(&DecryptRequest {
            private_key: vec![1, 2, 3],
            ciphertext: vec![],
        })
        .await
        .unwrap_err();
    match err {
        ClientError::Api(e) => assert_eq!(e.kind, ErrorKind::Integrity),
        other => panic!("{other}"),
    }
}

#[tokio::test]
async fn flows_and_bench() {
    let c = client().await;
    let flow = c
        .run_flow(&FlowRequest {
            flow: FlowKind::Direct,
            preset: Preset::Toy17,
            seed: 5,
        })
        .await
        .unwrap();
    assert!(flow.ok);
    assert_eq!(flow.messages, 2);
    let bench = c
        .bench(&BenchRequest {
            presets: vec![Preset::Toy17],
            trials: 10,
            format: TableFormat::Csv,
            seed: Some(6),
        })
        .await
        .unwrap();
    assert_eq!(bench.reports.len(), 1);
    assert!(bench.table.starts_with("preset,"));
}

#[tokio::test]
async fn unreachable_server_is_a_transport_error() {
    let c = Client::new("http://127.0.0.1:1");
    assert!(matches!(c.health().await, Err(ClientError::Transport(_))));
}
