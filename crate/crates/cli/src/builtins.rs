//! Embedded scenario files for the three rigid-body studies.

use crate::error::ParseError;
use crate::scenario_file::{parse_scenarios, ScenarioSpec};

pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

impl Builtin {
    pub fn scenarios(&self) -> Result<Vec<ScenarioSpec>, ParseError> {
        parse_scenarios(self.text)
    }
}

const FIG2: &str = concat!(
    "# Attitude from full orientation measurements, no noise.\n",
    "[scenario]\nname = fig2-passive\nfamily = SO\nn = 3\nobserver = lfso_passive\ngains = 1\n\n",
    "[plant]\ngroup = 0.6330, -0.1116, -0.7660; 0.7128, -0.3020, 0.6330; -0.3020, -0.9467, -0.1116\n\n",
    "[estimate]\ngroup = identity\n\n[input]\nkind = sinusoid\n\n",
    "[run]\nt_end = 10\noutput_period = 0.01\n\n",
    "[scenario]\nname = fig2-direct\nfamily = SO\nn = 3\nobserver = lfso_direct\ngains = 1\n\n",
    "[plant]\ngroup = 0.6330, -0.1116, -0.7660; 0.7128, -0.3020, 0.6330; -0.3020, -0.9467, -0.1116\n\n",
    "[estimate]\ngroup = identity\n\n[input]\nkind = sinusoid\n\n",
    "[run]\nt_end = 10\noutput_period = 0.01\n",
);

const FIG3: &str = concat!(
    "# Same setup with noisy measurements Y = R N, sigma = 0.4, 50 seeds per observer.\n",
    "[scenario]\nname = fig3-passive\nfamily = SO\nn = 3\nobserver = lfso_passive\ngains = 1\n\n",
    "[plant]\ngroup = 0.6330, -0.1116, -0.7660; 0.7128, -0.3020, 0.6330; -0.3020, -0.9467, -0.1116\n\n",
    "[estimate]\ngroup = identity\n\n[input]\nkind = sinusoid\n\n",
    "[noise]\nsigma = 0.4\nseed = 1\nbatch = 50\n\n",
    "[run]\nt_end = 10\noutput_period = 0.01\n\n",
    "[scenario]\nname = fig3-direct\nfamily = SO\nn = 3\nobserver = lfso_direct\ngains = 1\n\n",
    "[plant]\ngroup = 0.6330, -0.1116, -0.7660; 0.7128, -0.3020, 0.6330; -0.3020, -0.9467, -0.1116\n\n",
    "[estimate]\ngroup = identity\n\n[input]\nkind = sinusoid\n\n",
    "[noise]\nsigma = 0.4\nseed = 1\nbatch = 50\n\n",
    "[run]\nt_end = 10\noutput_period = 0.01\n",
);

macro_rules! fig4_block {
    ($name:literal, $observer:literal, $noise:literal) => {
        concat!(
            "[scenario]\nname = ",
            $name,
            "\nfamily = SO\nn = 3\nobserver = ",
            $observer,
            "\ngains = 1, 2\n\n",
            "[plant]\ngroup = 0, 1, 0; 0, 0, 1; 1, 0, 0\nx2 = 0, -1, 1; 1, 0, -1; -1, 1, 0\n\n",
            "[estimate]\ngroup = identity\nx2 = zero\n\n[input]\nkind = sinusoid\n\n",
            $noise,
            "[run]\nt_end = 20\noutput_period = 0.01\n\n",
        )
    };
}

const FIG4: &str = concat!(
    "# Attitude and angular velocity from orientation measurements, increasing noise.\n",
    fig4_block!("fig4-direct-sigma0", "lpso_direct", ""),
    fig4_block!("fig4-passive-sigma0", "lpso_passive", ""),
    fig4_block!("fig4-direct-sigma0.2", "lpso_direct", "[noise]\nsigma = 0.2\nseed = 1\n\n"),
    fig4_block!("fig4-passive-sigma0.2", "lpso_passive", "[noise]\nsigma = 0.2\nseed = 1\n\n"),
    fig4_block!("fig4-direct-sigma0.4", "lpso_direct", "[noise]\nsigma = 0.4\nseed = 1\n\n"),
    fig4_block!("fig4-passive-sigma0.4", "lpso_passive", "[noise]\nsigma = 0.4\nseed = 1\n\n"),
);

pub const BUILTINS: [Builtin; 3] = [
    Builtin {
        name: "fig2-noiseless-lfso",
        description: "passive and direct full-state observers on SO(3), sigma = 0, t in [0, 10]",
        text: FIG2,
    },
    Builtin {
        name: "fig3-noisy-lfso",
        description: "passive and direct full-state observers on SO(3), sigma = 0.4, 50 seeds each",
        text: FIG3,
    },
    Builtin {
        name: "fig4-lpso-sweep",
        description: "direct and passive partial-state observers, sigma in {0, 0.2, 0.4}, t in [0, 20]",
        text: FIG4,
    },
];

pub fn find(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}
