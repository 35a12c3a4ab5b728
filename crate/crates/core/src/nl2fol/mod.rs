//! Natural-language to FOL translation: response preprocessing, prompt
//! assembly, the chat client abstraction and the bounded regeneration loop.

mod client;
mod preprocess;
mod prompt;
mod translate;

pub use client::{
    chat_request_body, ChatClient, ChatRequest, HttpChatClient, LlmEndpointConfig, ScriptError,
    ScriptedChatClient, TransportError,
};
pub use preprocess::{
    filter_speculative, split_steps, AnswerError, RawResponse, SpeculationFilter,
    DEFAULT_SPECULATION_KEYWORDS,
};
pub use prompt::{
    build_prompt, parse_llm_output, render_output, OutputError, ParsedOutput, PromptTemplate,
    Section, TemplateError,
};
pub use translate::{
    dedup_steps, translate, NlInstance, TranslationFailed, TranslationResult, MAX_ATTEMPTS,
};
