use serde::{Deserialize, Serialize};

use super::LayerSpec;

/// A named layer stack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Architecture {
    pub name: String,
    pub layers: Vec<LayerSpec>,
}

impl Architecture {
    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }
}

/// Decoder for 23×23 synthetic signals from a length-`m` code:
/// dense(m→529) → tanh → reshape → conv 32@7 → relu → conv 16@5 → tanh →
/// conv 8@3 → relu → conv 1@3 → tanh.
pub fn synthetic_net(m: usize) -> Architecture {
    use LayerSpec::*;
    Architecture {
        name: "synthetic_net".into(),
        layers: vec![
            Dense { input: m, output: 529 },
            Tanh,
            Reshape { h: 23, w: 23, c: 1 },
            Conv2d { in_channels: 1, out_channels: 32, kernel: 7 },
            Relu,
            Conv2d { in_channels: 32, out_channels: 16, kernel: 5 },
            Tanh,
            Conv2d { in_channels: 16, out_channels: 8, kernel: 3 },
            Relu,
            Conv2d { in_channels: 8, out_channels: 1, kernel: 3 },
            Tanh,
        ],
    }
}

/// Decoder for 28×28 MNIST digits from a length-`m` code:
/// dense(m→784) → relu → reshape → conv 32@5 → relu → conv 16@5 → relu →
/// conv 1@5 → relu.
pub fn mnist_net(m: usize) -> Architecture {
    use LayerSpec::*;
    Architecture {
        name: "mnist_net".into(),
        layers: vec![
            Dense { input: m, output: 784 },
            Relu,
            Reshape { h: 28, w: 28, c: 1 },
            Conv2d { in_channels: 1, out_channels: 32, kernel: 5 },
            Relu,
            Conv2d { in_channels: 32, out_channels: 16, kernel: 5 },
            Relu,
            Conv2d { in_channels: 16, out_channels: 1, kernel: 5 },
            Relu,
        ],
    }
}
