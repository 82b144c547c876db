use largecolor::algebra::Window;
use largecolor::statesum::fk_positive;
use largecolor::{BiSeries, BraidWord};

fn window(f: &BiSeries, lo2: i32) -> String {
    f.clone().with_window(Window::at_least(lo2)).to_text()
}

#[test]
fn ten_139_window() {
    let b = BraidWord::parse("1,1,1,1,2,1,1,1,2,2", 3).unwrap();
    let f = fk_positive(&b, 9).unwrap();
    assert_eq!(
        window(&f.series, -19),
        "2*q^9*x^(-19/2) + q^10*x^(-19/2) - q^8*x^(-17/2) + q^7*x^(-15/2) - 2*q^6*x^(-13/2) + q^4*x^(-7/2)"
    );
}

#[test]
fn ten_152_window() {
    let b = BraidWord::parse("1^3,2^2,1^2,2^3", 3).unwrap();
    let f = fk_positive(&b, 7).unwrap();
    assert_eq!(
        window(&f.series, -15),
        "q^6*x^(-15/2) + 2*q^7*x^(-15/2) - 3*q^6*x^(-13/2) + q^5*x^(-11/2) + q^4*x^(-7/2)"
    );
}
