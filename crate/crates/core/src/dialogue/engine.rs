use std::collections::VecDeque;

use super::{
    tips_for, BotKind, BotMessage, Card, Clock, DialogueConfig, DialogueError, PanelState, PanelStep, Pending, Phase,
    ReportedStep, Said, Session, TranscriptEntry, UserMessage,
};
use crate::exec_model::{EventKind, ExecutionModel, Interaction, InteractionId, ScreenId};
use crate::matcher::{AmbiguityKind, MatchOutcome, Matcher, ResolutionOutcome, TupleElement};
use crate::nlp::{extract_input_value, parse, Lexicon, ParsedPhrase};
use crate::predictor::{predict, step_text};
use crate::Score;

const OB_REPHRASE: &str = "Could you describe the problem differently, naming the screen elements involved?";
const STEP_REPHRASE: &str = "Please describe that step differently, naming the element you interacted with.";
const NEXT_STEP: &str = "What did you do next?";

type Queue = VecDeque<(InteractionId, Option<String>)>;

/// Drives sessions for one app model.
pub struct Dialogue<'a> {
    model: &'a ExecutionModel,
    lexicon: &'a Lexicon,
    config: &'a DialogueConfig,
    clock: &'a dyn Clock,
}

impl<'a> Dialogue<'a> {
    pub fn new(
        model: &'a ExecutionModel,
        lexicon: &'a Lexicon,
        config: &'a DialogueConfig,
        clock: &'a dyn Clock,
    ) -> Self {
        Dialogue {
            model,
            lexicon,
            config,
            clock,
        }
    }

    fn matcher(&self) -> Matcher<'a, Score> {
        Matcher::new(self.lexicon, self.config.threshold)
    }

    fn fresh(&self, session_id: &str, app_id: &str) -> Session {
        Session {
            session_id: session_id.to_string(),
            app_id: app_id.to_string(),
            phase: Phase::CollectOb,
            current_state: self.model.start().id,
            ob_text: None,
            ob_phrase: None,
            ob_screen: None,
            ob_attempts: 0,
            eb_text: None,
            eb_verified: false,
            steps: Vec::new(),
            pending: Pending::Nothing,
            transcript: Vec::new(),
        }
    }

    fn greeting(&self) -> BotMessage {
        BotMessage::new(
            BotKind::Prompt,
            format!(
                "Hi! I will help you report a problem in {}. What incorrect behavior did you observe?",
                self.model.app().name
            ),
        )
    }

    /// A new session in the OB phase plus the opening messages.
    pub fn start(&self, session_id: &str, app_id: &str) -> (Session, Vec<BotMessage>) {
        let mut session = self.fresh(session_id, app_id);
        let mut out = vec![self.greeting()];
        out.push(self.tips(session.phase));
        for m in &out {
            self.log(&mut session, Said::Bot(m.clone()));
        }
        (session, out)
    }

    /// Processes one user message. On error the session is left untouched.
    pub fn advance(&self, session: &mut Session, msg: UserMessage) -> Result<Vec<BotMessage>, DialogueError> {
        let transcript = std::mem::take(&mut session.transcript);
        let mut work = session.clone();
        session.transcript = transcript;
        let before = work.phase;
        let result = self.dispatch(&mut work, &msg);
        let mut out = result?;
        out.push(self.tips(work.phase));

        work.transcript = std::mem::take(&mut session.transcript);
        let seq = work.transcript.len() as u64;
        work.transcript.push(TranscriptEntry {
            seq,
            at: self.clock.now().to_rfc3339(),
            phase: before,
            said: Said::User(msg),
        });
        for m in &out {
            self.log(&mut work, Said::Bot(m.clone()));
        }
        *session = work;
        Ok(out)
    }

    fn log(&self, s: &mut Session, said: Said) {
        let seq = s.transcript.len() as u64;
        s.transcript.push(TranscriptEntry {
            seq,
            at: self.clock.now().to_rfc3339(),
            phase: s.phase,
            said,
        });
    }

    pub fn panel_state(&self, s: &Session) -> PanelState {
        let steps: Vec<PanelStep> = s
            .steps
            .iter()
            .enumerate()
            .map(|(i, st)| PanelStep {
                number: i + 1,
                text: st.text.clone(),
                screenshot: self.asset_url(s, &st.screenshot),
                input_value: st.input_value.clone(),
            })
            .collect();
        let screenshots = steps
            .iter()
            .skip(steps.len().saturating_sub(3))
            .map(|st| st.screenshot.clone())
            .collect();
        PanelState {
            phase: s.phase,
            steps,
            screenshots,
            tips: tips_for(s.phase),
        }
    }

    fn tips(&self, phase: Phase) -> BotMessage {
        BotMessage::new(BotKind::TipsUpdate, tips_for(phase).join("\n"))
    }

    fn asset_url(&self, s: &Session, path: &str) -> String {
        format!("{}/{}/{}", self.config.asset_base.trim_end_matches('/'), s.app_id, path)
    }

    fn screen_card(&self, s: &Session, id: ScreenId) -> Card {
        let screen = &self.model.screens()[id.0];
        let caption = screen
            .activity
            .rsplit('.')
            .next()
            .unwrap_or(&screen.activity)
            .to_string();
        Card {
            screenshot: self.asset_url(s, &screen.screenshot),
            caption,
            annotated: false,
            screen: Some(id),
            interaction: None,
        }
    }

    fn step_card(&self, s: &Session, id: InteractionId) -> Card {
        let e = self.edge(id);
        Card {
            screenshot: self.asset_url(s, &e.annotated_screenshot),
            caption: step_text(self.model, e),
            annotated: true,
            screen: None,
            interaction: Some(id),
        }
    }

    fn edge(&self, id: InteractionId) -> &'a Interaction {
        &self.model.interactions()[id.0]
    }

    fn report_link(&self, s: &Session, text: &str) -> BotMessage {
        let mut m = BotMessage::new(BotKind::ReportLink, text);
        m.link = Some(self.config.report_link.replace("{session}", &s.session_id));
        m
    }

    fn dispatch(&self, s: &mut Session, msg: &UserMessage) -> Result<Vec<BotMessage>, DialogueError> {
        use UserMessage as U;
        let illegal = || DialogueError::IllegalMessage {
            kind: msg.kind(),
            phase: s.phase,
        };
        match msg {
            U::ActionRestart => {
                let transcript = std::mem::take(&mut s.transcript);
                *s = self.fresh(&s.session_id, &s.app_id);
                s.transcript = transcript;
                return Ok(vec![
                    BotMessage::new(BotKind::Info, "Let's start over."),
                    self.greeting(),
                ]);
            }
            U::ActionPreview => {
                require_ob(s)?;
                return Ok(vec![self.report_link(s, "Here is a preview of your report.")]);
            }
            U::ActionFinish => {
                if s.phase == Phase::Done {
                    return Err(illegal());
                }
                require_ob(s)?;
                s.phase = Phase::Done;
                s.pending = Pending::Nothing;
                return Ok(vec![self.report_link(s, "Thank you! Your bug report is complete.")]);
            }
            U::StepEdit { step, text } => {
                if s.phase == Phase::Done {
                    return Err(illegal());
                }
                return self.edit_step(s, *step, text);
            }
            U::StepDeleteLast => {
                if s.phase.stage() < 2 || s.phase == Phase::Done {
                    return Err(illegal());
                }
                return self.delete_last(s);
            }
            _ => {}
        }

        match (s.phase, msg) {
            (Phase::CollectOb, U::Text { text }) => Ok(self.on_ob_text(s, nonempty(text)?)),
            (Phase::DisambiguateOb, U::ScreenSelection { indices }) => self.on_screen_selection(s, indices),
            (Phase::ConfirmOb, U::ConfirmYes) => {
                if let Pending::ObConfirm { screen } = s.pending {
                    s.ob_screen = Some(screen);
                }
                Ok(self.enter_eb(s, Vec::new()))
            }
            (Phase::ConfirmOb, U::ConfirmNo) => Ok(self.ob_failed(s, Vec::new())),
            (Phase::CollectEb, U::Text { text }) => self.on_eb_text(s, nonempty(text)?),
            (Phase::ConfirmEbScreen, U::ConfirmYes) => {
                s.eb_verified = true;
                self.enter_s2r(s)
            }
            (Phase::ConfirmEbScreen, U::ConfirmNo) => {
                s.eb_verified = false;
                self.enter_s2r(s)
            }
            (Phase::CollectS2r | Phase::OfferSuggestions, U::Text { text }) => self.on_step_text(s, nonempty(text)?),
            (Phase::OfferSuggestions, U::StepSelection { indices }) => self.on_suggestion_selection(s, indices),
            (Phase::CollectS2r, U::StepSelection { indices }) if matches!(s.pending, Pending::StepChoice { .. }) => {
                self.on_step_choice(s, indices)
            }
            (Phase::ConfirmS2r, U::ConfirmYes) => match std::mem::take(&mut s.pending) {
                Pending::StepConfirm {
                    interaction,
                    input_value,
                } => self.append_queue(s, Queue::from([(interaction, input_value)]), Vec::new()),
                _ => Err(DialogueError::Desynchronized("no step awaiting confirmation".into())),
            },
            (Phase::ConfirmS2r, U::ConfirmNo) => {
                s.phase = Phase::CollectS2r;
                s.pending = Pending::Nothing;
                Ok(vec![BotMessage::new(BotKind::RephraseRequest, STEP_REPHRASE)])
            }
            (Phase::CollectInput, U::Text { text }) => self.on_input(s, nonempty(text)?),
            (Phase::ConfirmLastStep, U::ConfirmYes) => {
                s.phase = Phase::Preview;
                s.pending = Pending::Nothing;
                Ok(vec![self.report_link(
                    s,
                    "Great! Here is a preview of your report. Use Finish to submit it, or edit the steps first.",
                )])
            }
            (Phase::ConfirmLastStep, U::ConfirmNo) => self.offer_or_prompt(s, Vec::new()),
            _ => Err(illegal()),
        }
    }

    fn ob_failed(&self, s: &mut Session, mut out: Vec<BotMessage>) -> Vec<BotMessage> {
        s.ob_attempts = s.ob_attempts.saturating_add(1);
        s.pending = Pending::Nothing;
        if s.ob_attempts >= self.config.max_ob_attempts {
            out.push(BotMessage::new(
                BotKind::Info,
                "I could not match the behavior to the app, so I will record your last description as it is.",
            ));
            return self.enter_eb(s, out);
        }
        s.phase = Phase::CollectOb;
        out.push(BotMessage::new(BotKind::RephraseRequest, OB_REPHRASE));
        out
    }

    fn on_ob_text(&self, s: &mut Session, text: &str) -> Vec<BotMessage> {
        s.ob_text = Some(text.to_string());
        let phrase = parse(text, self.lexicon).ok().and_then(|o| o.ob_part);
        let Some(phrase) = phrase else {
            return self.ob_failed(
                s,
                vec![BotMessage::new(
                    BotKind::Info,
                    "I did not understand that. Please use one sentence, e.g. \"The average fuel economy shows a NaN value\".",
                )],
            );
        };
        let found = self.matcher().match_ob(self.model, &phrase);
        s.ob_phrase = Some(phrase);
        match found.outcome {
            MatchOutcome::None => self.ob_failed(
                s,
                vec![BotMessage::new(
                    BotKind::Info,
                    "I could not recognize that behavior in the app.",
                )],
            ),
            MatchOutcome::Unique => {
                let screen = found.candidates[0].screen;
                s.phase = Phase::ConfirmOb;
                s.pending = Pending::ObConfirm { screen };
                vec![BotMessage::new(
                    BotKind::ConfirmationQuestion,
                    "Is this the screen where the problem happens?",
                )
                .with_cards(vec![self.screen_card(s, screen)])]
            }
            MatchOutcome::Multiple => {
                let candidates: Vec<ScreenId> = found.candidates.iter().map(|c| c.screen).collect();
                s.phase = Phase::DisambiguateOb;
                s.pending = Pending::ObCandidates { candidates, offset: 0 };
                vec![self.screen_batch(
                    s,
                    "Which of these screens shows the problem? Select one, or none if no screen fits.",
                )]
            }
        }
    }

    fn screen_batch(&self, s: &Session, text: &str) -> BotMessage {
        let Pending::ObCandidates { candidates, offset } = &s.pending else {
            return BotMessage::new(BotKind::ScreenCards, text);
        };
        let cards = candidates
            .iter()
            .skip(*offset)
            .take(self.config.card_cap)
            .map(|&c| self.screen_card(s, c))
            .collect();
        BotMessage::new(BotKind::ScreenCards, text).with_cards(cards)
    }

    fn on_screen_selection(&self, s: &mut Session, indices: &[usize]) -> Result<Vec<BotMessage>, DialogueError> {
        let Pending::ObCandidates { candidates, offset } = s.pending.clone() else {
            return Err(DialogueError::Desynchronized("no screens awaiting selection".into()));
        };
        let shown = candidates.len().saturating_sub(offset).min(self.config.card_cap);
        match indices {
            [] => {
                let next = offset + self.config.card_cap;
                if next < candidates.len() {
                    s.pending = Pending::ObCandidates {
                        candidates,
                        offset: next,
                    };
                    Ok(vec![self.screen_batch(
                        s,
                        "Do any of these screens show the problem? Select one, or none.",
                    )])
                } else {
                    Ok(self.ob_failed(s, Vec::new()))
                }
            }
            [i] if *i < shown => {
                s.ob_screen = Some(candidates[offset + i]);
                Ok(self.enter_eb(s, Vec::new()))
            }
            [_] => Err(DialogueError::InvalidPayload(format!("select an index below {shown}"))),
            _ => Err(DialogueError::InvalidPayload("select at most one screen".into())),
        }
    }

    fn enter_eb(&self, s: &mut Session, mut out: Vec<BotMessage>) -> Vec<BotMessage> {
        s.phase = Phase::CollectEb;
        s.pending = Pending::Nothing;
        out.push(BotMessage::new(
            BotKind::Prompt,
            "What did you expect the app to do instead?",
        ));
        out
    }

    fn on_eb_text(&self, s: &mut Session, text: &str) -> Result<Vec<BotMessage>, DialogueError> {
        let phrase = parse(text, self.lexicon).ok().and_then(|o| o.ob_part);
        let Some(phrase) = phrase else {
            return Ok(vec![BotMessage::new(
                BotKind::RephraseRequest,
                "Please describe the expected behavior in one sentence, e.g. \"The average fuel economy should be a number\".",
            )]);
        };
        s.eb_text = Some(text.to_string());
        let Some(ob) = s.ob_screen else {
            s.eb_verified = false;
            return self.enter_s2r(s);
        };
        if self.matcher().match_eb(&self.model.screens()[ob.0], &phrase) {
            s.eb_verified = true;
            return self.enter_s2r(s);
        }
        s.phase = Phase::ConfirmEbScreen;
        s.pending = Pending::EbConfirm;
        Ok(vec![BotMessage::new(
            BotKind::ConfirmationQuestion,
            "I could not find that behavior on the screen you selected. Is this the screen that should work correctly?",
        )
        .with_cards(vec![self.screen_card(s, ob)])])
    }

    fn enter_s2r(&self, s: &mut Session) -> Result<Vec<BotMessage>, DialogueError> {
        s.phase = Phase::CollectS2r;
        s.pending = Pending::Nothing;
        let launch = self.model.launch();
        s.steps = vec![ReportedStep {
            text: step_text(self.model, launch),
            interaction: launch.id,
            screenshot: launch.annotated_screenshot.clone(),
            input_value: None,
        }];
        s.current_state = launch.result;
        let out = vec![BotMessage::new(
            BotKind::Info,
            "Now let's go through the steps to reproduce the problem. I assume the first step was launching the app.",
        )];
        self.after_steps(s, out)
    }

    fn after_steps(&self, s: &mut Session, mut out: Vec<BotMessage>) -> Result<Vec<BotMessage>, DialogueError> {
        if s.ob_screen == Some(s.current_state) {
            s.phase = Phase::ConfirmLastStep;
            s.pending = Pending::LastStep;
            let last = s
                .steps
                .last()
                .map(|st| st.interaction)
                .unwrap_or(self.model.launch().id);
            out.push(
                BotMessage::new(
                    BotKind::ConfirmationQuestion,
                    "Was this the last step you performed before the problem appeared?",
                )
                .with_cards(vec![self.step_card(s, last)]),
            );
            return Ok(out);
        }
        self.offer_or_prompt(s, out)
    }

    fn offer_or_prompt(&self, s: &mut Session, mut out: Vec<BotMessage>) -> Result<Vec<BotMessage>, DialogueError> {
        if let Some(ob) = s.ob_screen {
            let paths = predict::<Score>(self.model, s.current_state, ob, &self.config.predictor)
                .map_err(|e| DialogueError::Desynchronized(e.to_string()))?;
            if !paths.is_empty() {
                let paths = paths
                    .into_iter()
                    .map(|p| p.truncated_steps.into_iter().map(|st| st.interaction).collect())
                    .collect();
                s.phase = Phase::OfferSuggestions;
                s.pending = Pending::Suggestions { paths, shown: 0 };
                out.push(self.suggestion_cards(
                    s,
                    "Did you perform any of these steps next? Select the ones you performed, in order, or none.",
                ));
                return Ok(out);
            }
        }
        s.phase = Phase::CollectS2r;
        s.pending = Pending::Nothing;
        out.push(BotMessage::new(BotKind::Prompt, NEXT_STEP));
        Ok(out)
    }

    fn suggestion_cards(&self, s: &Session, text: &str) -> BotMessage {
        let Pending::Suggestions { paths, shown } = &s.pending else {
            return BotMessage::new(BotKind::StepCards, text);
        };
        let cards = paths[*shown]
            .iter()
            .take(self.config.card_cap)
            .map(|&id| self.step_card(s, id))
            .collect();
        BotMessage::new(BotKind::StepCards, text).with_cards(cards)
    }

    fn on_suggestion_selection(&self, s: &mut Session, indices: &[usize]) -> Result<Vec<BotMessage>, DialogueError> {
        let Pending::Suggestions { paths, shown } = s.pending.clone() else {
            return Err(DialogueError::Desynchronized(
                "no suggestions awaiting selection".into(),
            ));
        };
        let path = &paths[shown];
        let visible = path.len().min(self.config.card_cap);
        check_ascending(indices, visible)?;
        if indices.is_empty() {
            if shown + 1 < paths.len() {
                s.pending = Pending::Suggestions {
                    paths,
                    shown: shown + 1,
                };
                return Ok(vec![self.suggestion_cards(
                    s,
                    "What about these steps? Select the ones you performed, in order, or none.",
                )]);
            }
            s.phase = Phase::CollectS2r;
            s.pending = Pending::Nothing;
            return Ok(vec![BotMessage::new(
                BotKind::Prompt,
                "Then please tell me what you did next.",
            )]);
        }
        let queue = indices.iter().map(|&i| (path[i], None)).collect();
        s.pending = Pending::Nothing;
        self.append_queue(s, queue, Vec::new())
    }

    fn on_step_choice(&self, s: &mut Session, indices: &[usize]) -> Result<Vec<BotMessage>, DialogueError> {
        let Pending::StepChoice {
            candidates,
            input_value,
        } = std::mem::take(&mut s.pending)
        else {
            return Err(DialogueError::Desynchronized("no steps awaiting selection".into()));
        };
        match indices {
            [] => Ok(vec![BotMessage::new(BotKind::RephraseRequest, STEP_REPHRASE)]),
            [i] if *i < candidates.len() => {
                self.append_queue(s, Queue::from([(candidates[*i], input_value)]), Vec::new())
            }
            [_] => {
                s.pending = Pending::StepChoice {
                    candidates,
                    input_value,
                };
                Err(DialogueError::InvalidPayload("selected step out of range".into()))
            }
            _ => {
                s.pending = Pending::StepChoice {
                    candidates,
                    input_value,
                };
                Err(DialogueError::InvalidPayload("select at most one step".into()))
            }
        }
    }

    fn describe(&self, e: &Interaction, value: Option<&str>) -> String {
        match (e.event, value, self.model.component_of(e)) {
            (EventKind::Type, Some(v), Some(c)) => format!("Enter '{v}' in '{}'", c.display_name()),
            _ => step_text(self.model, e),
        }
    }

    /// Appends steps in order, detouring for the value of TYPE steps.
    fn append_queue(
        &self,
        s: &mut Session,
        mut queue: Queue,
        mut out: Vec<BotMessage>,
    ) -> Result<Vec<BotMessage>, DialogueError> {
        while let Some((id, value)) = queue.pop_front() {
            let e = self.edge(id);
            s.steps.push(ReportedStep {
                text: self.describe(e, value.as_deref()),
                interaction: id,
                screenshot: e.annotated_screenshot.clone(),
                input_value: value.clone(),
            });
            s.current_state = e.result;
            if e.event == EventKind::Type && value.is_none() {
                let target = self
                    .model
                    .component_of(e)
                    .map(|c| c.display_name())
                    .unwrap_or_else(|| "the field".into());
                s.phase = Phase::CollectInput;
                s.pending = Pending::Input {
                    step: s.steps.len() - 1,
                    queue: queue.into_iter().collect(),
                };
                out.push(BotMessage::new(
                    BotKind::InputRequest,
                    format!("What text did you enter in '{target}'?"),
                ));
                return Ok(out);
            }
        }
        self.after_steps(s, out)
    }

    fn on_input(&self, s: &mut Session, text: &str) -> Result<Vec<BotMessage>, DialogueError> {
        let Pending::Input { step, queue } = std::mem::take(&mut s.pending) else {
            return Err(DialogueError::Desynchronized("no input awaited".into()));
        };
        let value = unquote(text);
        let e = self.edge(s.steps[step].interaction);
        s.steps[step].text = self.describe(e, Some(&value));
        s.steps[step].input_value = Some(value);
        self.append_queue(s, queue.into_iter().collect(), Vec::new())
    }

    fn on_step_text(&self, s: &mut Session, text: &str) -> Result<Vec<BotMessage>, DialogueError> {
        s.phase = Phase::CollectS2r;
        s.pending = Pending::Nothing;
        let parsed = parse(text, self.lexicon);
        let phrase = match &parsed {
            Ok(o) => o.s2r_part.clone(),
            Err(_) => None,
        };
        let Some(phrase) = phrase else {
            let hint = if parsed.is_ok() {
                "That sounds like a behavior rather than a step. Please describe the action you performed, e.g. \"Tap the save button\"."
            } else {
                "I did not understand that step. Please describe one action, e.g. \"Tap the save button\"."
            };
            return Ok(vec![BotMessage::new(BotKind::RephraseRequest, hint)]);
        };
        let r = self
            .matcher()
            .resolve_s2r(self.model, s.current_state, &phrase)
            .map_err(|e| DialogueError::Desynchronized(e.to_string()))?;
        let input_value = extract_input_value(&phrase, self.lexicon);
        match r.outcome {
            ResolutionOutcome::Resolved => {
                let id = r.resolved.expect("resolved outcome carries an interaction");
                s.phase = Phase::ConfirmS2r;
                let question = format!(
                    "Is this the step you performed: {}?",
                    self.describe(self.edge(id), input_value.as_deref())
                );
                s.pending = Pending::StepConfirm {
                    interaction: id,
                    input_value,
                };
                Ok(vec![
                    BotMessage::new(BotKind::ConfirmationQuestion, question).with_cards(vec![self.step_card(s, id)])
                ])
            }
            ResolutionOutcome::Ambiguous => {
                let candidates: Vec<InteractionId> = r.candidates.into_iter().take(self.config.card_cap).collect();
                let target = target_words(&phrase);
                let info = match r.ambiguity_kind {
                    Some(AmbiguityKind::MultiEvent) => {
                        format!("I am not sure which action you performed on '{target}'.")
                    }
                    _ => format!("More than one element matches '{target}'."),
                };
                let cards = candidates.iter().map(|&c| self.step_card(s, c)).collect();
                s.pending = Pending::StepChoice {
                    candidates,
                    input_value,
                };
                Ok(vec![
                    BotMessage::new(BotKind::Info, info),
                    BotMessage::new(
                        BotKind::StepCards,
                        "Which of these steps did you perform? Select one, or none.",
                    )
                    .with_cards(cards),
                ])
            }
            ResolutionOutcome::Mismatch => {
                let parts: Vec<String> = r
                    .missing_vocabulary
                    .iter()
                    .map(|el| match el {
                        TupleElement::Action => format!("the action '{}'", phrase.verb_or_action()),
                        TupleElement::Object => format!("'{}'", phrase.object),
                        TupleElement::Object2 => format!("'{}'", phrase.object2),
                    })
                    .collect();
                Ok(vec![
                    BotMessage::new(
                        BotKind::Info,
                        format!("I could not match {} to the app.", parts.join(" and ")),
                    ),
                    BotMessage::new(
                        BotKind::RephraseRequest,
                        "Could you rephrase that step using the words shown on the screen?",
                    ),
                ])
            }
        }
    }

    fn edit_step(&self, s: &mut Session, step: usize, text: &str) -> Result<Vec<BotMessage>, DialogueError> {
        let text = nonempty(text)?;
        if step == 0 || step > s.steps.len() {
            return Err(DialogueError::InvalidPayload(format!("no step {step}")));
        }
        s.steps[step - 1].text = text.to_string();
        Ok(vec![BotMessage::new(
            BotKind::Info,
            format!("Step {step} now reads: {text}"),
        )])
    }

    fn delete_last(&self, s: &mut Session) -> Result<Vec<BotMessage>, DialogueError> {
        if s.steps.len() <= 1 {
            return Err(DialogueError::NothingToDelete);
        }
        let removed = s.steps.pop().expect("more than one step");
        s.current_state = s
            .steps
            .last()
            .map(|st| self.edge(st.interaction).result)
            .unwrap_or(self.model.start().id);
        let out = vec![BotMessage::new(
            BotKind::Info,
            format!("I removed the last step: {}", removed.text),
        )];
        self.offer_or_prompt(s, out)
    }
}

fn require_ob(s: &Session) -> Result<(), DialogueError> {
    if s.ob_text.is_none() {
        return Err(DialogueError::NothingToReport);
    }
    Ok(())
}

fn nonempty(text: &str) -> Result<&str, DialogueError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(DialogueError::InvalidPayload("empty text".into()));
    }
    Ok(t)
}

fn check_ascending(indices: &[usize], limit: usize) -> Result<(), DialogueError> {
    if indices.iter().any(|&i| i >= limit) {
        return Err(DialogueError::InvalidPayload(format!("indices must be below {limit}")));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DialogueError::InvalidPayload(
            "indices must be strictly ascending".into(),
        ));
    }
    Ok(())
}

fn unquote(text: &str) -> String {
    let t = text.trim();
    let stripped = t
        .strip_prefix(['"', '\'', '\u{201c}'])
        .and_then(|r| r.strip_suffix(['"', '\'', '\u{201d}']));
    stripped.unwrap_or(t).trim().to_string()
}

fn target_words(p: &ParsedPhrase) -> String {
    if !p.object.is_empty() {
        p.object.clone()
    } else {
        p.verb_or_action().to_string()
    }
}

impl ParsedPhrase {
    fn verb_or_action(&self) -> &str {
        if self.verb.is_empty() {
            &self.action
        } else {
            &self.verb
        }
    }
}
