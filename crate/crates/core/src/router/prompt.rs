//! Chat messages for level-two classification.

use serde::{Deserialize, Serialize};

use super::SublabelRequest;

/// Shared system message for every parent class.
pub const SYSTEM_PROMPT: &str = "Your input fields are:
1. `mention` (str): the mention to extract the type from
2. `context` (str): the context surrounding the mention
3. `possible_tags` (list[str]): list of possible level-2 tags

Your output fields are:
1. `reasoning` (str)
2. `tag` (str): the type of mention. MUST BE ONE OF THE POSSIBLE TAGS PROVIDED.

All interactions will be structured in the following way, with the appropriate values filled in.

[[ ## mention ## ]]
{mention}

[[ ## context ## ]]
{context}

[[ ## possible_tags ## ]]
{possible_tags}

[[ ## reasoning ## ]]
{reasoning}

[[ ## tag ## ]]
{tag}

[[ ## completed ## ]]

In adhering to this structure, your objective is:
Extract contiguous tokens referring to members of congress, titles, or simple names, if any, from a list of string tokens. Output a list of tokens.";

pub const MENTION_MARKER: &str = "[[ ## mention ## ]]";
pub const CONTEXT_MARKER: &str = "[[ ## context ## ]]";
pub const POSSIBLE_TAGS_MARKER: &str = "[[ ## possible_tags ## ]]";
pub const REASONING_MARKER: &str = "[[ ## reasoning ## ]]";
pub const TAG_MARKER: &str = "[[ ## tag ## ]]";
pub const COMPLETED_MARKER: &str = "[[ ## completed ## ]]";

const CLOSING_INSTRUCTION: &str = "Respond with the corresponding output fields, starting with the field [[ ## reasoning ## ]], then [[ ## tag ## ]], and then ending with the marker for [[ ## completed ## ]].";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessages {
    pub system: String,
    pub user: String,
}

/// `["A", "B"]` with JSON string quoting.
pub fn format_tag_list(tags: &[&str]) -> String {
    let quoted: Vec<String> = tags
        .iter()
        .map(|t| serde_json::to_string(t).expect("strings serialize"))
        .collect();
    format!("[{}]", quoted.join(", "))
}

/// Builds the system and user messages for one request.
pub fn build_prompt(req: &SublabelRequest) -> ChatMessages {
    let tags = format_tag_list(&req.routing().allowed_prompt_tags());
    let user = format!(
        "{MENTION_MARKER}\n{}\n\n{CONTEXT_MARKER}\n{}\n\n{POSSIBLE_TAGS_MARKER}\n{tags}\n\n{CLOSING_INSTRUCTION}",
        req.mention_text(),
        req.context(),
    );
    ChatMessages {
        system: SYSTEM_PROMPT.to_string(),
        user,
    }
}
