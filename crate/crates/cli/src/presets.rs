//! Configurations embedded in the binary.

pub const PRESETS: &[(&str, &str)] = &[
    (
        "noisy-sphereplus",
        include_str!("../presets/noisy-sphereplus.cfg"),
    ),
    (
        "prop1-bad-init",
        include_str!("../presets/prop1-bad-init.cfg"),
    ),
    (
        "sec4-counterexample",
        include_str!("../presets/sec4-counterexample.cfg"),
    ),
    ("thm2-example", include_str!("../presets/thm2-example.cfg")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
