//! End-to-end runs of the shipped scenarios, pinned against hand-traced
//! timelines, plus a closed-form oracle for linear pipelines: a token
//! that visits k stages at unit latency finishes at time k and leaves
//! exactly 2k+2 log events (inject and retire bracket an enter/exit pair
//! per visit).

mod common;

use common::{parse_model, read_scenario};
use flowthing::dsl::parse;
use flowthing::sim::{parse_scenario, simulate, Value};

#[test]
fn procurement_accept_pays_the_supplier() {
    let model = parse_model("procurement");
    let scenario = read_scenario("procurement-accept");
    let log = simulate(&model, &scenario).expect("accept run completes");

    assert_eq!(log.final_time(), 24);
    assert_eq!(log.retired.len(), 8, "accept path moves eight tokens");
    assert!(log.verdicts.is_empty());

    let payments = log.retired_of_thing("Payment");
    assert_eq!(payments.len(), 1);
    let (_, payment) = payments[0];
    assert_eq!(payment.endpoint.to_string(), "Supplier.Payments.transfer");
    assert_eq!(payment.time, 24);

    let stocked: Vec<_> = log
        .retired
        .values()
        .filter(|r| r.endpoint.to_string() == "Manufacturer.Stores.process")
        .collect();
    assert_eq!(stocked.len(), 1, "accepted goods are stored");
    assert_eq!(stocked[0].time, 22);

    assert!(
        !log.retired
            .values()
            .any(|r| r.endpoint.machine_path() == "Supplier.Returns"),
        "nothing is returned on the accept path"
    );
}

#[test]
fn procurement_reject_returns_the_goods() {
    let model = parse_model("procurement");
    let scenario = read_scenario("procurement-reject");
    let log = simulate(&model, &scenario).expect("reject run completes");

    assert_eq!(log.final_time(), 24);
    assert_eq!(log.retired.len(), 7, "reject path moves seven tokens");

    let returned: Vec<_> = log
        .retired
        .values()
        .filter(|r| r.endpoint.to_string() == "Supplier.Returns.transfer")
        .collect();
    assert_eq!(returned.len(), 1);
    assert_eq!(returned[0].thing, "Goods");
    assert_eq!(returned[0].time, 24);

    assert!(
        log.retired_of_thing("Payment").is_empty(),
        "no payment leaves on the reject path"
    );
    assert!(
        !log.retired
            .values()
            .any(|r| r.endpoint.machine_path() == "Manufacturer.Stores"),
        "rejected goods are not stored"
    );
}

#[test]
fn cert_issuance_reaches_repository_employee_and_audit() {
    let model = parse_model("cert-issuance");
    let scenario = read_scenario("cert-issuance-run");
    let log = simulate(&model, &scenario).expect("issuance run completes");

    assert_eq!(log.final_time(), 40);
    assert_eq!(log.retired.len(), 12);

    // The issued certificate fans out: one copy lands in the repository,
    // one goes back to the employee, both at the same tick.
    let certs = log.retired_of_thing("Certificate");
    let cert_stops: Vec<(String, u64)> = certs
        .iter()
        .map(|(_, r)| (r.endpoint.to_string(), r.time))
        .collect();
    assert_eq!(
        cert_stops,
        vec![
            ("Repository.Deposits.process".to_string(), 35),
            ("Employee.Certificates.process".to_string(), 35),
        ]
    );

    // Both copies carry the original request attributes.
    for (_, cert) in &certs {
        assert_eq!(
            cert.attrs.get("subject"),
            Some(&Value::Text("alice.example".into()))
        );
    }

    // Audit hears about the issuance and the deposit.
    let audit = log.retired_of_thing("AuditEntry");
    let audit_stops: Vec<String> = audit.iter().map(|(_, r)| r.endpoint.to_string()).collect();
    assert_eq!(
        audit_stops,
        vec![
            "Audit.IssueLog.process".to_string(),
            "Audit.DepositLog.process".to_string()
        ]
    );

    // The delivery confirmation closes the loop last.
    let receipts = log.retired_of_thing("Receipt");
    assert_eq!(receipts.len(), 1);
    assert_eq!(receipts[0].1.endpoint.to_string(), "PKIServer.Acks.receive");
    assert_eq!(receipts[0].1.time, 40);

    // Vetting passed, so no rejection notice was born.
    assert!(log.retired_of_thing("Notice").is_empty());
}

#[test]
fn doc_signing_delivers_a_fully_assembled_envelope() {
    let model = parse_model("doc-signing");
    let scenario = read_scenario("doc-signing-run");
    let log = simulate(&model, &scenario).expect("signing run completes");

    assert_eq!(log.final_time(), 21);
    assert_eq!(log.retired.len(), 7);

    let delivered = log.retired_of_thing("SignedDocument");
    assert_eq!(delivered.len(), 1);
    let (_, envelope) = delivered[0];
    assert_eq!(envelope.endpoint.to_string(), "Destination.Inbox.receive");
    assert_eq!(envelope.time, 19);

    // Digest and ciphers match the worked example: digest 2180, every
    // code shifted up by d=9, signature cipher 2180+9.
    assert_eq!(envelope.attrs.get("hash"), Some(&Value::Int(2180)));
    assert_eq!(envelope.attrs.get("sig_cipher"), Some(&Value::Int(2189)));
    assert_eq!(
        envelope.attrs.get("doc_cipher"),
        Some(&Value::Text(
            "93,113,110,41,108,113,110,108,116,41,114,124,41,114,119,41,125,113,110,41,118,106,114,117,55"
                .into()
        ))
    );
    // The merge folded in all four envelope parts.
    assert_eq!(envelope.attrs.get("image_hash"), Some(&Value::Int(4242)));
    assert_eq!(
        envelope.attrs.get("policy"),
        Some(&Value::Text("attached".into()))
    );
    assert_eq!(envelope.attrs.get("serial"), Some(&Value::Int(7)));
    assert_eq!(
        envelope.attrs.get("body"),
        Some(&Value::Text("The check is in the mail.".into()))
    );
}

#[test]
fn decryption_confirms_the_signature() {
    let model = parse_model("decryption");
    let scenario = read_scenario("decryption-run");
    let log = simulate(&model, &scenario).expect("verification run completes");

    assert_eq!(log.final_time(), 19);
    assert_eq!(log.verdicts.get("match"), Some(&Value::Text("true".into())));

    let verdicts = log.retired_of_thing("Verdict");
    assert_eq!(verdicts.len(), 1);
    let (_, verdict) = verdicts[0];
    assert_eq!(verdict.endpoint.to_string(), "Verifier.HashChecks.process");
    assert_eq!(verdict.time, 19);
    assert_eq!(
        verdict.attrs.get("plain"),
        Some(&Value::Text("The check is in the mail.".into()))
    );
    assert_eq!(
        verdict.attrs.get("hash_recomputed"),
        Some(&Value::Int(2180))
    );
    assert_eq!(verdict.attrs.get("hash_from_sig"), Some(&Value::Int(2180)));
    assert_eq!(
        verdict.attrs.get("match"),
        Some(&Value::Text("true".into()))
    );
}

/// (model, injection stage, visits) for linear pipelines of increasing
/// length; the closed form below is the independent oracle.
const PIPELINES: [(&str, usize); 4] = [
    ("sphere A {\n  machine M of Box {\n    stages: create\n  }\n}\n", 1),
    (
        "sphere A {\n  machine M of Box {\n    stages: create, release\n  }\n}\nflow A.M.create -> A.M.release\n",
        2,
    ),
    (
        "sphere A {\n  machine M of Box {\n    stages: create, release, transfer\n  }\n}\nflow A.M.create -> A.M.release\nflow A.M.release -> A.M.transfer\n",
        3,
    ),
    (
        "sphere A {\n  machine M of Box {\n    stages: create, process, release, transfer\n  }\n}\nflow A.M.create -> A.M.process\nflow A.M.process -> A.M.release\nflow A.M.release -> A.M.transfer\n",
        4,
    ),
];

#[test]
fn unit_latency_pipeline_matches_closed_form() {
    for (src, visits) in PIPELINES {
        let model = parse(src).unwrap();
        let scenario = parse_scenario("inject 1 Box at A.M.create time 0\n").unwrap();
        let log = simulate(&model, &scenario).unwrap();
        assert_eq!(
            log.final_time(),
            visits as u64,
            "final time of {visits}-stage chain"
        );
        assert_eq!(
            log.events.len(),
            2 * visits + 2,
            "event count of {visits}-stage chain"
        );
    }
}

#[test]
fn two_machine_chain_matches_closed_form() {
    let src = "\
sphere A {
  machine M of Box {
    stages: create, release, transfer
  }
  machine N of Box {
    stages: transfer, receive, process
  }
}
flow A.M.create -> A.M.release
flow A.M.release -> A.M.transfer
flow A.N.transfer -> A.N.receive
flow A.N.receive -> A.N.process
flow A.M.transfer -> A.N.transfer
";
    let model = parse(src).unwrap();
    let scenario = parse_scenario("inject 1 Box at A.M.create time 0\n").unwrap();
    let log = simulate(&model, &scenario).unwrap();
    // Six stage visits across the two machines.
    assert_eq!(log.final_time(), 6);
    assert_eq!(log.events.len(), 2 * 6 + 2);
}

#[test]
fn latency_override_shifts_the_closed_form() {
    let (src, visits) = PIPELINES[3];
    let model = parse(src).unwrap();
    for latency in [2u64, 5, 9] {
        let scenario = parse_scenario(&format!(
            "inject 1 Box at A.M.create time 0\nlatency A.M.process = {latency}\n"
        ))
        .unwrap();
        let log = simulate(&model, &scenario).unwrap();
        // One visit stretches from 1 tick to `latency`, the rest stay unit.
        assert_eq!(log.final_time(), visits as u64 - 1 + latency);
        assert_eq!(log.events.len(), 2 * visits + 2);
    }
}
