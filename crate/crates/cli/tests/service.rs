use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use mtpga_cli::service::{router, ServiceState};
use mtpga_core::analysis::BasisArchive;
use mtpga_core::pga::{fit_basis, PgaParams};
use mtpga_testkit::gen::random_ensemble;
use mtpga_testkit::rng;
use serde_json::Value;
use tower::ServiceExt;

fn app(d_max: usize, with_inputs: bool) -> (Router, BasisArchive) {
    let ens = random_ensemble(&mut rng(21), 8, 12, 0.05, 0.15);
    let (basis, _) = fit_basis(&ens, &PgaParams::with_defaults(d_max, &ens)).unwrap();
    let mut archive = BasisArchive::new(&basis);
    archive.member_ids = (0..ens.len()).map(|i| format!("m{i}")).collect();
    let state = ServiceState::new(archive.clone(), with_inputs.then_some(ens)).unwrap();
    (router(state, None), archive)
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn get(uri: &str) -> Request<Body> {
    Request::get(uri).body(Body::empty()).unwrap()
}

fn post(uri: &str, body: &str) -> Request<Body> {
    Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap()
}

#[tokio::test]
async fn layout_meta_and_correlation() {
    let (app, archive) = app(2, true);
    let (status, layout) = call(&app, get("/api/layout")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(layout["points"].as_array().unwrap().len(), 8);
    assert_eq!(layout["labels"][3], "m3");

    let (status, meta) = call(&app, get("/api/basis/meta")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(meta["dMax"], 2);
    assert_eq!(meta["originBranches"], archive.origin.len());
    assert_eq!(meta["hasInputs"], true);

    let (status, corr) = call(&app, get("/api/correlation")).await;
    assert_eq!(status, StatusCode::OK);
    for a in corr["arrows"].as_array().unwrap() {
        let (x, y) = (a[0].as_f64().unwrap(), a[1].as_f64().unwrap());
        assert!(x.abs() <= 1.0 && y.abs() <= 1.0);
    }
}

#[tokio::test]
async fn reconstruct_endpoint() {
    let (app, archive) = app(2, true);
    let (status, v) = call(&app, post("/api/reconstruct", r#"{"alpha":[0.3,0.7]}"#)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["bdt"]["branches"].as_array().unwrap().len(), archive.origin.len());
    assert!(v["mergeTree"]["nodes"].is_array());

    let (status, v) = call(&app, post("/api/reconstruct", r#"{"alpha":[2]}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("alpha out of [0,1]"));
    let (status, _) = call(&app, post("/api/reconstruct", r#"{"alpha":[0.1,0.1,0.1]}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, post("/api/reconstruct", "not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn member_endpoint() {
    let (app, archive) = app(2, true);
    let (status, v) = call(&app, get("/api/member/2")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["id"], "m2");
    assert_eq!(v["alpha"][0].as_f64().unwrap(), archive.coords[2][0]);
    assert!(v["input"]["branches"].is_array());
    assert_eq!(v["reconstruction"]["branches"].as_array().unwrap().len(), archive.origin.len());
    let (status, _) = call(&app, get("/api/member/99")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn missing_views_are_not_found() {
    let (app, _) = app(1, false);
    let (status, _) = call(&app, get("/api/layout")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, get("/api/correlation")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let resp = app.clone().oneshot(get("/")).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
}

#[tokio::test]
async fn serves_static_assets() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>explorer</p>").unwrap();
    let ens = random_ensemble(&mut rng(22), 4, 8, 0.05, 0.1);
    let (basis, _) = fit_basis(&ens, &PgaParams::with_defaults(1, &ens)).unwrap();
    let state = ServiceState::new(BasisArchive::new(&basis), None).unwrap();
    let app = router(state, Some(dir.path().to_path_buf()));
    let resp = app.clone().oneshot(get("/index.html")).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let body = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(&body[..], b"<p>explorer</p>");
    let (status, _) = call(&app, get("/api/basis/meta")).await;
    assert_eq!(status, StatusCode::OK);
}
