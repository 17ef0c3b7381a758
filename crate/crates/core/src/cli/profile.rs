use serde_json::{json, Value};

use crate::sampling::REFERENCE_PROBABILITIES;

/// Continued pre-training and fine-tuning hyperparameters, for downstream
/// trainers. Nothing here is executed by this crate.
pub fn default_training_profile() -> Value {
    let probs: serde_json::Map<String, Value> = REFERENCE_PROBABILITIES
        .iter()
        .map(|&(l, p)| (l.to_string(), json!(p)))
        .collect();
    json!({
        "continuous_pretraining": {
            "sampling_probability": probs,
            "duration": "60K steps",
            "batch_size": 64,
            "sequence_length": 2048,
            "learning_rate": 2e-5,
            "warmup_ratio": 0.0,
            "weight_decay": 0.01,
            "lr_scheduler": "cosine",
            "training_type": "full finetuning"
        },
        "finetuning": {
            "duration": "1 epoch",
            "batch_size": 128,
            "max_source_length": 512,
            "max_target_length": 512,
            "learning_rate": 2e-4,
            "warmup_ratio": 0.01,
            "weight_decay": 0.01,
            "lr_scheduler": "inverse_sqrt",
            "training_type": "LoRA r=64 for all layers",
            "lora_rank": 64
        }
    })
}
