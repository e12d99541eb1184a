use std::net::SocketAddr;
use std::sync::Arc;

use fuzzyshell::fixture;
use fuzzyshell::kb::OverrideRecord;
use fuzzyshell_service::{
    serve, ChildRecord, Config, ErrorBody, KbAccepted, KbDocument, KbVariables, StoredConsultation,
    TherapyService,
};
use reqwest::{Client, StatusCode};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::oneshot;

struct Server {
    base: String,
    client: Client,
    stop: Option<oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl Server {
    async fn start(config: Config) -> Self {
        let service = Arc::new(TherapyService::open(&config).unwrap());
        let listener = TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0)))
            .await
            .unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel();
        let task = tokio::spawn(serve(listener, service, async {
            let _ = rx.await;
        }));
        Self {
            base,
            client: Client::new(),
            stop: Some(tx),
            task,
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    async fn send(
        &self,
        method: reqwest::Method,
        path: &str,
        body: Option<Value>,
    ) -> (StatusCode, Value) {
        let mut req = self.client.request(method, self.url(path));
        if let Some(body) = body {
            req = req.json(&body);
        }
        let resp = req.send().await.unwrap();
        let status = resp.status();
        (status, resp.json().await.unwrap())
    }

    async fn get(&self, path: &str) -> (StatusCode, Value) {
        self.send(reqwest::Method::GET, path, None).await
    }

    async fn post(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.send(reqwest::Method::POST, path, Some(body)).await
    }

    async fn put(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.send(reqwest::Method::PUT, path, Some(body)).await
    }

    async fn stop(mut self) {
        self.stop.take().unwrap().send(()).unwrap();
        self.task.await.unwrap().unwrap();
    }
}

fn example_inputs() -> Value {
    json!({
        "speech_problems_level": 1.62,
        "family_implication": 2.0,
        "child_age": 4.5,
    })
}

fn err(body: Value) -> ErrorBody {
    serde_json::from_value(body).unwrap()
}

#[tokio::test]
async fn consultation_reports_full_trace() {
    let server = Server::start(Config::default()).await;
    let (status, body) = server
        .post("/consult", json!({ "inputs": example_inputs() }))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    let stored: StoredConsultation = serde_json::from_value(body.clone()).unwrap();
    assert_eq!(stored.id, 1);
    let r = &stored.result;
    assert_eq!(r.kb_revision, 0);
    assert_eq!(r.firings.len(), 5);
    let terms: Vec<&str> = r.aggregate.term_alphas.keys().map(String::as_str).collect();
    assert_eq!(terms, ["high", "low", "normal"]);
    assert!((r.crisp_output - 1.56).abs() < 0.01);
    assert_eq!(
        r.recommendation.as_ref().unwrap().note,
        "1 to 2 sessions per week (2 preferred)"
    );
    assert_eq!(body["result"]["firings"][0]["rule_id"], "r1");

    let (status, again) = server.get("/consultations/1").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, body);
    server.stop().await;
}

#[tokio::test]
async fn same_inputs_same_revision_same_result() {
    let server = Server::start(Config::default()).await;
    let (_, a) = server
        .post("/consult", json!({ "inputs": example_inputs() }))
        .await;
    let (_, b) = server
        .post("/consult", json!({ "inputs": example_inputs() }))
        .await;
    assert_ne!(a["id"], b["id"]);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(
        serde_json::to_string(&a["result"]).unwrap(),
        serde_json::to_string(&b["result"]).unwrap()
    );
    server.stop().await;
}

#[tokio::test]
async fn consultation_errors() {
    let server = Server::start(Config::default()).await;

    let (status, body) = server
        .post(
            "/consult",
            json!({ "inputs": { "speech_problems_level": 1.0, "family_implication": 2.0 } }),
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let e = err(body);
    assert_eq!(e.code, "missing-inputs");
    assert_eq!(e.missing.as_deref(), Some(&["child_age".to_string()][..]));
    assert!(e.message.contains("child_age"));

    let mut inputs = example_inputs();
    inputs["family_implication"] = json!(4.0);
    let (status, body) = server.post("/consult", json!({ "inputs": inputs })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err(body).code, "no-rule-fired");

    let mut inputs = example_inputs();
    inputs["child_age"] = json!(9.0);
    let (status, body) = server.post("/consult", json!({ "inputs": inputs })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let e = err(body);
    assert_eq!(e.code, "out-of-universe");
    assert_eq!(e.variable.as_deref(), Some("child_age"));

    let (status, body) = server
        .post(
            "/consult",
            json!({ "inputs": example_inputs(), "resolution": 1 }),
        )
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err(body).code, "invalid-request");

    let (status, body) = server.post("/consult", json!({ "input": {} })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err(body).code, "invalid-request");

    let (status, body) = server
        .post(
            "/consult",
            json!({ "inputs": example_inputs(), "child_id": 42 }),
        )
        .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err(body).code, "not-found");

    // nothing was stored by the failures
    let (status, _) = server.get("/consultations/1").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    server.stop().await;
}

#[tokio::test]
async fn knowledge_base_edits_are_revision_guarded() {
    let server = Server::start(Config::default()).await;
    let (status, body) = server.get("/kb").await;
    assert_eq!(status, StatusCode::OK);
    let doc: KbDocument = serde_json::from_value(body).unwrap();
    assert_eq!(doc.revision, 0);
    let kb = fuzzyshell::parse_kb(&doc.document).unwrap();
    assert_eq!(kb.rules().len(), 5);
    assert_eq!(kb.to_document(), doc.document);

    let edited = doc.document.replace(
        "(family_implication is reduce) THEN weekly_session_number is high",
        "(family_implication is reduce) THEN weekly_session_number is normal",
    );
    assert_ne!(edited, doc.document);
    let (status, body) = server
        .put("/kb", json!({ "document": edited, "expected_revision": 0 }))
        .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let accepted: KbAccepted = serde_json::from_value(body).unwrap();
    assert_eq!(accepted.revision, 1);
    assert_eq!(accepted.warnings.len(), 1, "high is no longer concluded");

    let (status, body) = server
        .put(
            "/kb",
            json!({ "document": doc.document, "expected_revision": 0 }),
        )
        .await;
    assert_eq!(status, StatusCode::CONFLICT);
    let e = err(body);
    assert_eq!(e.code, "conflict");
    assert_eq!(e.current_revision, Some(1));

    let contradiction = format!(
        "{}IF (speech_problems_level is low) and (child_age is small) and (family_implication is moderate) THEN weekly_session_number is high;\n",
        edited
    );
    let (status, body) = server
        .put(
            "/kb",
            json!({ "document": contradiction, "expected_revision": 1 }),
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let e = err(body);
    assert_eq!(e.code, "invalid-kb");
    let diags = e.diagnostics.unwrap();
    assert!(diags.iter().any(|d| d.code == "contradiction"));

    let (_, body) = server.get("/kb").await;
    assert_eq!(body["revision"], 1);

    let (status, body) = server
        .post("/consult", json!({ "inputs": example_inputs() }))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["result"]["kb_revision"], 1);

    let (status, body) = server
        .post(
            "/kb/edits",
            json!({ "kind": "delete_rule", "id": "r1", "expected_revision": 1 }),
        )
        .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["revision"], 2);
    let (status, body) = server
        .post(
            "/kb/edits",
            json!({ "kind": "delete_rule", "id": "r9", "expected_revision": 2 }),
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err(body).diagnostics.unwrap()[0].code, "unknown-rule");
    server.stop().await;
}

#[tokio::test]
async fn variables_expose_plot_geometry() {
    let server = Server::start(Config::default()).await;
    let (status, body) = server.get("/kb/variables").await;
    assert_eq!(status, StatusCode::OK);
    let vars: KbVariables = serde_json::from_value(body.clone()).unwrap();
    assert_eq!(vars.revision, 0);
    assert_eq!(vars.variables.len(), 4);
    let age = &vars.variables[2];
    assert_eq!(age.name, "child_age");
    assert_eq!((age.universe.lo(), age.universe.hi()), (3.0, 7.0));
    assert_eq!(age.terms[1].vertices, [(4.0, 0.0), (5.0, 1.0), (6.0, 0.0)]);
    assert_eq!(body["variables"][3]["role"], "output");
    server.stop().await;
}

#[tokio::test]
async fn children_overrides_and_filters() {
    let server = Server::start(Config::default()).await;
    let (status, body) = server
        .post(
            "/children",
            json!({ "display_label": "child-A", "age_years": 5.0 }),
        )
        .await;
    assert_eq!(status, StatusCode::CREATED);
    let a: ChildRecord = serde_json::from_value(body).unwrap();
    let (_, body) = server
        .post(
            "/children",
            json!({ "display_label": "child-B", "age_years": 6.5 }),
        )
        .await;
    let b: ChildRecord = serde_json::from_value(body).unwrap();
    for bad in [
        json!({ "display_label": "x", "age_years": 9.0 }),
        json!({ "display_label": " ", "age_years": 4.0 }),
    ] {
        let (status, body) = server.post("/children", bad).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(err(body).code, "invalid-child");
    }

    let (_, ca) = server
        .post(
            "/consult",
            json!({ "inputs": example_inputs(), "child_id": a.id }),
        )
        .await;
    let (_, cb) = server
        .post(
            "/consult",
            json!({ "inputs": example_inputs(), "child_id": b.id }),
        )
        .await;
    server
        .post("/consult", json!({ "inputs": example_inputs() }))
        .await;

    let (status, body) = server
        .get(&format!("/children/{}/consultations", a.id))
        .await;
    assert_eq!(status, StatusCode::OK);
    let list: Vec<StoredConsultation> = serde_json::from_value(body).unwrap();
    assert_eq!(
        list.iter().map(|c| c.id).collect::<Vec<_>>(),
        [ca["id"].as_u64().unwrap()]
    );
    let (status, _) = server.get("/children/99/consultations").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = server.get("/children/abc/consultations").await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, body) = server
        .post(
            "/overrides",
            json!({ "consultation_id": cb["id"], "therapist_value": 3.0, "note": "needs more practice" }),
        )
        .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    let record: OverrideRecord = serde_json::from_value(body).unwrap();
    assert_eq!(record.id, 1);
    assert_eq!(record.child_id, Some(b.id));
    assert_eq!(record.kb_revision_at_override, 0);
    let snapshot = serde_json::to_value(&record.consultation_snapshot).unwrap();
    assert_eq!(snapshot, cb["result"]);

    let system = ca["result"]["crisp_output"].clone();
    let (status, body) = server
        .post(
            "/overrides",
            json!({ "consultation_id": ca["id"], "therapist_value": system }),
        )
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err(body).code, "invalid-override");
    let (status, body) = server
        .post(
            "/overrides",
            json!({ "consultation_id": 77, "therapist_value": 1.0 }),
        )
        .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err(body).code, "not-found");
    server
        .post(
            "/overrides",
            json!({ "consultation_id": ca["id"], "therapist_value": 1.0 }),
        )
        .await;

    let (_, all) = server.get("/overrides").await;
    assert_eq!(all.as_array().unwrap().len(), 2);
    let (_, only_a) = server.get(&format!("/overrides?child_id={}", a.id)).await;
    let only_a = only_a.as_array().unwrap();
    assert_eq!(only_a.len(), 1);
    assert_eq!(only_a[0]["consultation_id"], ca["id"]);
    let (status, body) = server.get("/overrides?child_id=x").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err(body).code, "invalid-request");

    let (status, body) = server.get("/nowhere").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err(body).code, "not-found");
    server.stop().await;
}

#[tokio::test]
async fn state_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = Config {
        data_dir: Some(dir.path().to_path_buf()),
        ..Config::default()
    };
    let server = Server::start(config.clone()).await;
    let (_, child) = server
        .post(
            "/children",
            json!({ "display_label": "c1", "age_years": 4.0 }),
        )
        .await;
    let (_, consult) = server
        .post(
            "/consult",
            json!({ "inputs": example_inputs(), "child_id": child["id"] }),
        )
        .await;
    server
        .post(
            "/overrides",
            json!({ "consultation_id": consult["id"], "therapist_value": 2.5, "note": "n" }),
        )
        .await;
    let (_, kb) = server.get("/kb").await;
    server
        .put(
            "/kb",
            json!({ "document": kb["document"], "expected_revision": 0 }),
        )
        .await;
    server.stop().await;

    let server = Server::start(config).await;
    let (_, kb) = server.get("/kb").await;
    assert_eq!(kb["revision"], 1);
    let (_, list) = server
        .get(&format!("/children/{}/consultations", child["id"]))
        .await;
    assert_eq!(list[0], consult);
    let (_, overrides) = server.get("/overrides").await;
    assert_eq!(overrides[0]["consultation_snapshot"], consult["result"]);
    let (_, next) = server
        .post("/consult", json!({ "inputs": example_inputs() }))
        .await;
    assert_eq!(next["id"], 2);
    assert_eq!(next["result"]["kb_revision"], 1);
    server.stop().await;
}

#[tokio::test]
async fn data_directory_is_seeded_from_kb_path() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.fkb");
    std::fs::write(&seed, fixture::synthetic_kb_document(12)).unwrap();
    let config = Config {
        kb_path: Some(seed),
        data_dir: Some(dir.path().join("data")),
        ..Config::default()
    };
    let service = TherapyService::open(&config).unwrap();
    assert_eq!(service.kb_store().snapshot().rules().len(), 12);
    assert!(dir.path().join("data").join("kb.fkb").exists());

    let broken = dir.path().join("broken.fkb");
    std::fs::write(&broken, "variable x input range 0 1 {").unwrap();
    let err = TherapyService::open(&Config {
        kb_path: Some(broken),
        ..Config::default()
    })
    .unwrap_err();
    assert!(!err.diagnostics().unwrap().is_empty());
}

#[tokio::test]
async fn concurrent_consults_see_whole_revisions() {
    let server = Arc::new(Server::start(Config::default()).await);
    let (_, kb) = server.get("/kb").await;
    let original = kb["document"].as_str().unwrap().to_string();
    let edited = original.replace("term medium tri 4 5 6", "term medium tri 4 5.5 7");
    assert_ne!(edited, original);

    let writer = {
        let server = Arc::clone(&server);
        tokio::spawn(async move {
            for rev in 0..10u64 {
                let doc = if rev % 2 == 0 { &edited } else { &original };
                let (status, _) = server
                    .put("/kb", json!({ "document": doc, "expected_revision": rev }))
                    .await;
                assert_eq!(status, StatusCode::OK);
            }
        })
    };
    let mut expected = std::collections::HashMap::new();
    let readers: Vec<_> = (0..4)
        .map(|_| {
            let server = Arc::clone(&server);
            tokio::spawn(async move {
                let mut seen = Vec::new();
                for _ in 0..15 {
                    let (status, body) = server
                        .post("/consult", json!({ "inputs": example_inputs() }))
                        .await;
                    assert_eq!(status, StatusCode::CREATED);
                    seen.push(body["result"].clone());
                }
                seen
            })
        })
        .collect();
    writer.await.unwrap();
    for reader in readers {
        for result in reader.await.unwrap() {
            let rev = result["kb_revision"].as_u64().unwrap();
            // even revisions hold the original document, odd ones the edit
            let entry = expected.entry(rev % 2).or_insert_with(|| result.clone());
            let mut a = entry.clone();
            let mut b = result.clone();
            a["kb_revision"] = json!(0);
            b["kb_revision"] = json!(0);
            assert_eq!(a, b);
        }
    }
}
