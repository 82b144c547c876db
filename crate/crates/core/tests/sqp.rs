use largecolor::knots::lookup;
use largecolor::verify::check_fixture;
use std::collections::BTreeSet;

fn check(name: &str) {
    let f = lookup(name).unwrap();
    let printed = f.window().unwrap().unwrap();
    let orders: BTreeSet<i32> = printed.terms().map(|t| t.1).collect();
    assert!(orders.len() >= 4, "{name}: only {} x-orders printed", orders.len());
    let (ok, detail) = check_fixture(&f).unwrap();
    assert!(ok, "{name}: {detail}");
}

#[test]
fn m10_145_window() {
    check("m(10_145)");
}

#[test]
fn k10_154_window() {
    check("10_154");
}

#[test]
fn k10_161_window() {
    check("10_161");
}
