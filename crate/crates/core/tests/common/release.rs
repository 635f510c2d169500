//! Published size and mention counts of the released train/dev/test splits.

#![allow(dead_code)]

pub const SPLITS: [&str; 3] = ["train", "dev", "test"];

pub const BILLS: [u64; 3] = [80, 21, 30];
pub const TOKENS: [u64; 3] = [77_372, 23_819, 31_740];
pub const TOTAL_MENTIONS: [u64; 3] = [3_388, 1_029, 1_393];
/// Reported for reference only; the counting rule behind it is not stated.
pub const UNIQUE_MENTIONS: [u64; 3] = [1_108, 448, 556];

/// Level-one mention counts in train/dev/test order.
pub const LEVEL1: [(&str, [u64; 3]); 6] = [
    ("Abstraction", [217, 91, 79]),
    ("Act", [197, 40, 80]),
    ("Class", [208, 57, 67]),
    ("Document", [774, 214, 350]),
    ("Organization", [1261, 379, 579]),
    ("Person", [731, 248, 238]),
];

/// Level-two mention counts in train/dev/test order, keyed by prompt name.
pub const LEVEL2: [(&str, [u64; 3]); 30] = [
    ("Case", [0, 0, 0]),
    ("Doctrine", [8, 0, 1]),
    ("Fund", [39, 11, 1]),
    ("Infrastructure", [3, 0, 21]),
    ("Misc", [4, 0, 0]),
    ("Program", [30, 39, 18]),
    ("Session", [87, 21, 31]),
    ("Specification", [14, 17, 0]),
    ("System", [32, 3, 7]),
    ("Amendment", [3, 1, 1]),
    ("PublicAct", [194, 39, 79]),
    ("Non-ProtectedClass", [194, 45, 59]),
    ("ProtectedClass", [14, 12, 8]),
    ("Bill", [162, 42, 60]),
    ("Code", [30, 2, 5]),
    ("Parenthetical", [204, 32, 112]),
    ("Reference", [361, 131, 171]),
    ("Report", [17, 7, 2]),
    ("Treaty", [0, 0, 0]),
    ("Agency", [249, 78, 191]),
    ("Association", [28, 38, 38]),
    ("Committee", [158, 44, 78]),
    ("InternationalInstitution", [1, 0, 3]),
    ("LegislativeBody", [566, 150, 194]),
    ("Locality", [20, 7, 28]),
    ("Nation", [178, 35, 120]),
    ("State", [61, 27, 17]),
    ("Member", [339, 106, 121]),
    ("Name", [4, 0, 0]),
    ("Title", [388, 142, 117]),
];

/// Totals over all three splits.
pub const LEVEL1_TOTALS: [(&str, u64); 6] = [
    ("Abstraction", 387),
    ("Act", 317),
    ("Class", 332),
    ("Document", 1_338),
    ("Organization", 2_219),
    ("Person", 1_217),
];
