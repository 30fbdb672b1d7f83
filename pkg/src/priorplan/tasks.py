"""Per-task data: action catalogs, role prompts, critic verdict tables, cases.

Prompt templates use ``str.format`` fields. ``{emotion_line}`` and friends
render to an empty string when emotion tracking is switched off, so the
ablation removes the whole segment rather than leaving a dangling label.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .core import Action, ActionCatalog, CaseInfo, TaskId


class Status(str, enum.Enum):
    ONGOING = "Ongoing"
    COMPLETED = "Completed"
    FAILED = "Failed"


def _catalog(task: TaskId, rows: list[tuple[str, str]], noop: str) -> ActionCatalog:
    actions = tuple(Action(i, name, prompt) for i, (name, prompt) in enumerate(rows, start=1))
    noop_index = next(a.index for a in actions if a.name == noop)
    return ActionCatalog(task, actions, noop_index)


CATALOGS: dict[TaskId, ActionCatalog] = {
    TaskId.ESCONV: _catalog(
        TaskId.ESCONV,
        [
            ("Question", "Please ask the Patient to elaborate on the situation they just described."),
            ("Self-disclosure", "Please provide a statement relating to the Patient about the situation they just described."),
            ("Affirmation and Reassurance", "Please provide affirmation and reassurance to the Patient on the situation they just described."),
            ("Providing Suggestions", "Please provide suggestion to the Patient on the situation they just described."),
            ("Others", "Please chat with the Patient."),
            ("Reflection of feelings", "Please acknowledge the Patient's feelings about the situation they described."),
            ("Information", "Please provide factual information to help the Patient with their situation."),
            ("Restatement or Paraphrasing", "Please acknowledge the Patient's feelings by paraphrasing their situation."),
        ],
        noop="Others",
    ),
    TaskId.CIMA: _catalog(
        TaskId.CIMA,
        [
            ("Hint", "Please provide knowledge to the Student via a hint."),
            ("Question", "Please ask a question to the Student to determine the Student's understanding or continue the conversation."),
            ("Correction", "Please correct the mistake or address the misconception the Student has."),
            ("Confirmation", "Please confirm the Student's answer or understanding is correct."),
            ("Others", "Please chat with the Student without any pedagogical strategy."),
        ],
        noop="Others",
    ),
    TaskId.CB: _catalog(
        TaskId.CB,
        [
            ("greet", "Please say hello or chat randomly."),
            ("inquire", "Please ask any question about product, year, price, usage, etc."),
            ("inform", "Please provide information about the product, year, usage, etc."),
            ("propose", "Please initiate a price or a price range for the product."),
            ("counter", "Please propose a new price or a new price range."),
            ("counter-noprice", "Please propose a vague price by using comparatives with existing price."),
            ("confirm", "Please ask a question about the information to be confirmed."),
            ("affirm", "Please give an affirmative response to a confirm."),
            ("deny", "Please give a negative response to a confirm."),
            ("agree", "Please agree with the proposed price."),
            ("disagree", "Please disagree with the proposed price."),
        ],
        noop="greet",
    ),
    TaskId.EXTES: _catalog(
        TaskId.EXTES,
        [
            ("Reflective Statements", "Please reflect back what the user has expressed to show you understand their thoughts or feelings."),
            ("Clarification", "Please ask a question to clarify what the user meant or provide more detail about what they said."),
            ("Emotional Validation", "Please acknowledge and validate the user's emotional experience in a caring way."),
            ("Empathetic Statements", "Please express empathy toward the user's situation to show that you genuinely care."),
            ("Affirmation", "Please affirm the user's efforts, strengths, or positive qualities."),
            ("Offer Hope", "Please offer a message of hope or optimism about the user's situation."),
            ("Avoid Judgment and Criticism", "Please respond in a supportive and neutral way without making any judgments."),
            ("Suggest Options", "Please suggest possible options or actions the user could consider."),
            ("Collaborative Planning", "Please invite the user to collaboratively make a plan or decision together."),
            ("Provide Different Perspectives", "Please help the user consider a different point of view or alternative way of thinking."),
            ("Reframe Negative Thoughts", "Please help the user reframe their negative thoughts into something more constructive."),
            ("Share Information", "Please provide factual or helpful information that is relevant to the user's situation."),
            ("Normalize Experiences", "Please reassure the user that their feelings or experiences are common and understandable."),
            ("Promote Self-Care Practices", "Please encourage the user to engage in healthy self-care activities."),
            ("Stress Management", "Please offer strategies or tips to help the user reduce or manage stress."),
            ("Others", "Please continue the conversation in a natural and supportive manner."),
        ],
        noop="Others",
    ),
    TaskId.P4G: _catalog(
        TaskId.P4G,
        [
            ("Proposition of donation", "Please suggest that the persuadee make a donation to 'Save the Children'."),
            ("Proposition of amount to be donated", "Please propose a small donation amount (e.g., $1 or $2) that the persuadee could consider."),
            ("Proposition of confirmation of donation", "Please ask the persuadee to confirm if they are ready to make the donation."),
            ("Proposition of more donation", "Please suggest that the persuadee could consider donating a bit more if they are willing."),
            ("Experience affirmation", "Please affirm the persuadee's views or experiences to build rapport and trust."),
            ("Greeting", "Please start or continue the conversation with a polite and friendly greeting."),
            ("Ask for donation rejection purpose", "Please ask the persuadee why they might be hesitant or unwilling to donate."),
            ("Thank", "Please thank the persuadee for their time, attention, or for considering a donation."),
            ("Logical appeal", "Please use logical reasoning to explain why donating to 'Save the Children' is impactful and effective."),
            ("Emotion appeal", "Please appeal to the persuadee's emotions by highlighting the struggles of children in need."),
            ("Credibility appeal", "Please mention the credibility or reputation of 'Save the Children' to strengthen your argument."),
            ("Foot in the door", "Please start by asking for a very small commitment to increase the chance of later agreement."),
            ("Self-modeling", "Please share a statement like 'I also donated' to encourage the persuadee to do the same."),
            ("Donation information", "Please share factual information about how donations are used or how they help children."),
            ("Personal story", "Please share a short, emotional personal story about a child helped by the charity."),
            ("Source-related inquiry", "Please ask the persuadee where they usually get information about charities or donations."),
            ("Task-related inquiry", "Please ask the persuadee about their experiences or preferences related to charitable giving."),
            ("Personal-related inquiry", "Please ask a personal question that helps understand the persuadee's values or priorities."),
            ("Neutral inquiry", "Please ask a general question to keep the conversation going and learn more about the persuadee."),
        ],
        noop="Neutral inquiry",
    ),
}


# ---------------------------------------------------------------- prompts

_ESC_POLICY = (
    "You are a specialist in policy-planning for emotional support conversations. The following is a "
    "conversation between a therapist and a patient. The patient's emotion states throughout the "
    "conversation are also provided. Your task is to decide the most therapeutically helpful next action "
    "the therapist should do based on the patient's emotion history and the conversation flow. The "
    "therapist's goal is to help the patient feel emotionally understood, supported, and to make progress "
    "toward emotional resolution."
)

POLICY_INSTRUCTIONS: dict[TaskId, str] = {
    TaskId.ESCONV: _ESC_POLICY,
    TaskId.EXTES: _ESC_POLICY,
    TaskId.CIMA: (
        "You are a specialist in policy-planning for tutoring interactions between a teacher and a student. "
        "The following is a conversation between a teacher and a student. The student's emotional states "
        "throughout the conversation are also provided. Your task is to decide what the teacher should do "
        "next based on the student's progress, emotion history and flow of the conversation. The goal is to "
        "effectively guide the student towards correctly translating the target English sentence into "
        "Italian in a timely and effective manner."
    ),
    TaskId.CB: (
        "You are a specialist in policy planning for negotiation between a buyer and a seller. The following "
        "is a conversation between a buyer and a seller. The seller's emotion states throughout the "
        "conversation are also provided. Your task is to decide what action the buyer should take next based "
        "on the seller's emotion history, the negotiation flow, and the conversation flow. The goal is to "
        "maximize the buyer's benefit."
    ),
    TaskId.P4G: (
        "You are a specialist in policy-planning for persuasive conversations. Your job is to select the best "
        "next steps the persuader should take to guide the persuadee toward making a donation to 'Save the "
        "Children'. Use the persuadee's emotional history and the conversation context to make your decision. "
        "Focus on choosing actions that are persuasive, emotionally appropriate, and therapeutic."
    ),
}

POLICY_DIRECTIVE = (
    "Conversation so far:\n{conversation}\n"
    "{emotion_line}"
    "\nOptions:\n{options}\n\n"
    "Choose the TOP {k} most suitable actions from the given options list. "
    "Reply ONLY in the given format: 1,2,4,5"
)
POLICY_EMOTION_LINE = "\nEmotion History: {emotions}\n"


@dataclass(frozen=True)
class RolePrompt:
    instruction: str
    directive: str


USER_PROMPTS: dict[TaskId, RolePrompt] = {
    TaskId.ESCONV: RolePrompt(
        "You are role playing as a patient in a counseling conversation with a therapist. You are seeking "
        "help from the therapist, because you are dealing with emotional issues related to {emotion_type} "
        "regarding {problem_type}",
        "Conversation so far:\n{conversation}\n\nThe therapist just said: {last_system}.\n\n"
        "Express how you feel in a natural, emotional way. Please reply with only one short and succinct sentence.",
    ),
    TaskId.EXTES: RolePrompt(
        "You are role playing as a patient in a counseling conversation with a therapist. You are seeking "
        "help from the therapist, because you are dealing with emotional issues related to {problem_type}.",
        "Conversation so far:\n{conversation}\n\nThe therapist just said: {last_system}.\n\n"
        "Express how you feel in a natural, emotional way. Please reply with only one short and succinct sentence.",
    ),
    TaskId.CIMA: RolePrompt(
        "You are role-playing as a student who is learning Italian in a tutoring session. You do not know how "
        "to translate {english_sentence} into Italian.\n\n"
        "Your goal is to learn through interaction with the teacher. Respond naturally as a student would.",
        "Conversation so far:\n{conversation}\n\nThe teacher just said: {last_system}.\n\n"
        "Please reply as a student with only one short and natural sentence.\n\n"
        "If you're confused, it's okay to ask for clarification.",
    ),
    TaskId.CB: RolePrompt(
        "You are role playing as a persuasive seller in a price bargaining game.\n\n"
        "You are trying to sell the {product} at your desired price of {seller_desired_price}.\n"
        "Product Description: {background}",
        "Conversation so far:\n{conversation}\n\nThe buyer just said: {last_system}.\n"
        "Respond as the seller in ONE short, persuasive sentence.",
    ),
    TaskId.P4G: RolePrompt(
        "You are role playing as a persuadee in a persuasive conversation.\n"
        "A persuader is trying to convince you to donate to a charity called 'Save the Children'",
        "Conversation so far:\n{conversation}\n\nThe persuader just said: {last_system}.\n"
        "Respond as the persuadee in ONE short sentence.",
    ),
}

_THERAPIST_SYSTEM = (
    "You are role playing as a therapist in a counseling conversation with a patient. Your goal is to help "
    "the patient resolve their emotional issues and assist them in understanding and working through their "
    "challenges."
)
_THERAPIST_DIRECTIVE = (
    "Conversation so far:\n{conversation}\n\nThe patient just said: {last_user}.\n\n"
    "Please infer the patient's emotional state in one word (Example: Emotion: ...) followed by your "
    "response, which should be only one short and succint sentence (Response: ...).\n\n{action_prompt}"
)

SYSTEM_PROMPTS: dict[TaskId, RolePrompt] = {
    TaskId.ESCONV: RolePrompt(_THERAPIST_SYSTEM, _THERAPIST_DIRECTIVE),
    TaskId.EXTES: RolePrompt(_THERAPIST_SYSTEM, _THERAPIST_DIRECTIVE),
    TaskId.CIMA: RolePrompt(
        "You are role-playing as a teacher in a tutoring conversation.\n\n"
        "Your task is to guide the student to translate the English sentence {english_sentence} into Italian.\n\n"
        "Please do not tell the student the answer or ask the student about other exercises.\n\n{action_prompt}",
        "Conversation so far:\n{conversation}\n\nThe student just said: {last_user}.\n\n"
        "Based on the student's message, infer their emotional state in (e.g: Emotion: ...).\n"
        "Then give your reply as the teacher in one short and helpful sentence (e.g: Response: ...).\n\n"
        "{action_prompt}",
    ),
    TaskId.CB: RolePrompt(
        "You are role playing as a skilled buyer in a price bargaining game.\n"
        "You are trying to buy the {product} at your target price of {buyer_target_price}.\n"
        "Product description: {background}.\n\n"
        "Your goal is to negotiate effectively and get the lowest price without losing the deal.",
        "Conversation so far:\n{conversation}\n\nThe seller just said: {last_user}.\n"
        "First, infer the seller's emotional state in one word (Example: Emotion: ...).\n"
        "Then, respond as the buyer using ONE short and persuasive sentence (Response: ...).\n\n{action_prompt}",
    ),
    TaskId.P4G: RolePrompt(
        "You are role playing as a persuader. Your goal is to persuade the persuadee to donate to a charity "
        "called 'Save the Children'. 'Save the Children' is head-quartered in London, and they work to fight "
        "poverty around the world, especially in developing countries and war zones. Small donations like $1 "
        "or $2 go a long way to help.",
        "Conversation so far:\n{conversation}\n\nThe persuadee just said: {last_user}.\n\n"
        "First, infer the persuadee's emotional state in one word (Example: Emotion: ...).\n\n"
        "Then, based on that emotional state, respond as the persuader using ONE short and persuasive "
        "sentence (Response: ...).\n\n{action_prompt}",
    ),
}

_COUNSEL_OPTIONS = (
    "- No, the patient feels worse.\n"
    "- No, the patient feels the same.\n"
    "- No, but the patient feels somewhat better.\n"
    "- Yes, the patient's emotional issues have been resolved."
)
# the "better" option is not part of the ExTES reward scheme, so it is not offered
_EXTES_OPTIONS = (
    "- No, the patient feels worse.\n"
    "- No, the patient feels the same.\n"
    "- Yes, the patient's emotional issues have been resolved."
)

CRITIC_PROMPTS: dict[TaskId, RolePrompt] = {
    TaskId.ESCONV: RolePrompt(
        "You are an expert in assessing counseling sessions between a patient and a therapist.\n"
        "Your task is to evaluate whether the conversation helped improve the patient's emotional state.\n"
        "The session concerns the emotion type {emotion_type} and the problem type {problem_type}.",
        "Conversation so far:\n{conversation}\n"
        "{emotion_line}"
        "\nBased on the conversation and emotional trajectory, please respond with ONE AND ONLY ONE of the "
        "following:\n\n" + _COUNSEL_OPTIONS,
    ),
    TaskId.EXTES: RolePrompt(
        "You are an expert in assessing counseling sessions between a patient and a therapist. Your task is "
        "to evaluate whether the conversation helped improve the patient's emotional state. The session "
        "concerns the problem of: {problem_type}.",
        "Conversation so far:\n{conversation}\n"
        "{emotion_line}"
        "\nBased on the conversation and emotional trajectory, please respond with ONE AND ONLY ONE of the "
        "following:\n\n" + _EXTES_OPTIONS,
    ),
    TaskId.CIMA: RolePrompt(
        "You are role-playing as an expert in evaluating tutoring conversations between a teacher and a "
        "student.\n\nThe goal is to evaluate whether the student correctly translated the English sentence "
        "{english_sentence} into Italian.{emotion_states_line}",
        "Conversation so far:\n{conversation}\n\n"
        "Please answer the following question strictly by choosing ONE AND ONLY ONE of the exact responses "
        "listed below.\n"
        "Did the student correctly translate the entire sentence {english_sentence} into Italian?\n"
        "Respond with one of the following options:\n"
        "- No, the Student made an incorrect translation.\n"
        "- No, the Student did not try to translate.\n"
        "- No, the Student only correctly translated a part of {english_sentence}.\n"
        "- Yes, the Student correctly translated the whole sentence of {english_sentence}.",
    ),
    TaskId.CB: RolePrompt(
        "You are an expert in evaluating negotiations between a buyer and a seller.\n"
        "Your job is to determine if they have successfully reached a deal at the end of the conversation."
        "{emotion_states_line}",
        "Conversation so far:\n{conversation}\n\n"
        "Please determine whether the buyer and the seller have successfully reached a deal at the end of "
        "the conversation.\n\n"
        "If they have reached a deal, extract the final agreed price (as a number only) and reply with this "
        "exact format: They have reached a deal at [price].\n\n"
        "Otherwise, reply with: They have not reached a deal.",
    ),
    TaskId.P4G: RolePrompt(
        "You are an expert in evaluating persuasive conversations between a persuader and a persuadee.\n"
        "Your job is to determine if the persuader has successfully convinced the persuadee to donate to a "
        "charity called 'Save the Children'.{emotion_states_line}",
        "Conversation so far:\n{conversation}\n\n"
        "Please evaluate the following conversation and strictly choose ONE of the exact responses listed "
        "below.\n\n"
        "Question: Has the persuadee has been successfully convinced to make a donation at the end of the "
        "conversation?\n\n"
        "Respond with one of the following options:\n"
        "- The persuadee has explicitly refused.\n"
        "- The persuadee remains neutral about donating.\n"
        "- The persuadee has a positive attitude towards donating but hasn't decided yet.\n"
        "- The persuadee has decided to donate.",
    ),
}

CRITIC_EMOTION_LINE = "\nEmotion History: {emotions}.\n"
# where the critic instruction names the user role, e.g. "The seller's emotional states ..."
CRITIC_EMOTION_STATES_LINE: dict[TaskId, str] = {
    TaskId.CIMA: "\n\nThe emotion states of the student during the conversation were: {emotions}",
    TaskId.CB: "\nThe seller's emotional states throughout the conversation were: {emotions}",
    TaskId.P4G: "\nThe persuadee's emotional states throughout the conversation were: {emotions}",
}

# mentions of the tracked emotions inside fixed instructions; dropped when tracking is off
_EMOTION_REFS = re.compile(
    r" The \w+'s emotion(?:al)? states throughout the conversation are also provided\."
    r"|(?:the \w+'s )?emotion(?:al)? history(?:,| and) "
    r"| and emotional trajectory"
)


def strip_emotion_refs(text: str) -> str:
    return _EMOTION_REFS.sub("", text.replace(", emotion history and ", " and "))


EMOTION_INSTRUCTION = (
    "You track the emotional state of a person in a conversation. "
    "Reply with exactly one lowercase word naming the emotion expressed in the message, and nothing else."
)
EMOTION_DIRECTIVE = "Message: {utterance}\nEmotion word:"


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    """One critic option.

    ``option`` is the verbatim option sentence; ``[english_sentence]`` or
    ``[price]`` mark case-dependent tails. ``reward`` is None for the CB
    deal verdict, whose reward is computed from the agreed price.
    """

    option: str
    reward: float | None
    status: Status


VERDICT_MAPS: dict[TaskId, tuple[Verdict, ...]] = {
    TaskId.ESCONV: (
        Verdict("No, the patient feels worse.", -1.0, Status.ONGOING),
        Verdict("No, the patient feels the same.", -0.5, Status.ONGOING),
        Verdict("No, but the patient feels somewhat better.", 0.5, Status.ONGOING),
        Verdict("Yes, the patient's emotional issues have been resolved.", 1.0, Status.COMPLETED),
    ),
    TaskId.CIMA: (
        Verdict("No, the Student made an incorrect translation.", -1.0, Status.ONGOING),
        Verdict("No, the Student did not try to translate.", -0.5, Status.ONGOING),
        Verdict("No, the Student only correctly translated a part of [english_sentence].", 0.5, Status.ONGOING),
        Verdict("Yes, the Student correctly translated the whole sentence of [english_sentence].", 1.0, Status.COMPLETED),
    ),
    TaskId.P4G: (
        Verdict("The persuadee has explicitly refused.", -1.0, Status.ONGOING),
        Verdict("The persuadee remains neutral about donating.", -0.5, Status.ONGOING),
        Verdict("The persuadee has a positive attitude towards donating but hasn't decided yet.", 0.1, Status.ONGOING),
        Verdict("The persuadee has decided to donate.", 1.0, Status.COMPLETED),
    ),
    TaskId.EXTES: (
        Verdict("No, the patient feels worse.", -1.0, Status.ONGOING),
        Verdict("No, the patient feels the same.", 0.5, Status.ONGOING),
        Verdict("Yes, the patient's emotional issues have been resolved.", 1.0, Status.COMPLETED),
    ),
    TaskId.CB: (
        Verdict("They have not reached a deal.", 0.0, Status.ONGOING),
        Verdict("They have reached a deal at [price]", None, Status.COMPLETED),
    ),
}


@dataclass(frozen=True)
class TaskProfile:
    task_id: TaskId
    catalog: ActionCatalog
    verdict_map: tuple[Verdict, ...]
    max_turns: int = 8
    policy_instruction: str = ""
    system_prompt: RolePrompt | None = None
    user_prompt: RolePrompt | None = None
    critic_prompt: RolePrompt | None = None


def get_profile(task_id: TaskId | str, max_turns: int = 8) -> TaskProfile:
    task_id = TaskId(task_id)
    return TaskProfile(
        task_id=task_id,
        catalog=CATALOGS[task_id],
        verdict_map=VERDICT_MAPS[task_id],
        max_turns=max_turns,
        policy_instruction=POLICY_INSTRUCTIONS[task_id],
        system_prompt=SYSTEM_PROMPTS[task_id],
        user_prompt=USER_PROMPTS[task_id],
        critic_prompt=CRITIC_PROMPTS[task_id],
    )


# ---------------------------------------------------------------- sample cases

SAMPLE_CASES: dict[TaskId, tuple[CaseInfo, ...]] = {
    TaskId.ESCONV: (
        CaseInfo(TaskId.ESCONV, "My manager hinted at layoffs in today's meeting and I keep replaying it in my head.",
                 extras={"emotion_type": "anxiety", "problem_type": "job crisis"}, case_id="esc-0"),
        CaseInfo(TaskId.ESCONV, "My sister stopped answering my calls after our argument at the wedding.",
                 extras={"emotion_type": "sadness", "problem_type": "conflict with family"}, case_id="esc-1"),
        CaseInfo(TaskId.ESCONV, "I failed my driving test for the third time and everyone keeps asking about it.",
                 extras={"emotion_type": "shame", "problem_type": "academic pressure"}, case_id="esc-2"),
        CaseInfo(TaskId.ESCONV, "I moved to a new city and have not made a single friend in four months.",
                 extras={"emotion_type": "loneliness", "problem_type": "social isolation"}, case_id="esc-3"),
    ),
    TaskId.EXTES: (
        CaseInfo(TaskId.EXTES, "I can't sleep since the accident on the highway last month.",
                 extras={"problem_type": "trauma after a car accident"}, case_id="ext-0"),
        CaseInfo(TaskId.EXTES, "My startup ran out of money and I had to let my whole team go.",
                 extras={"problem_type": "business failure"}, case_id="ext-1"),
        CaseInfo(TaskId.EXTES, "My dog passed away and the house feels empty.",
                 extras={"problem_type": "pet loss"}, case_id="ext-2"),
    ),
    TaskId.CIMA: (
        CaseInfo(TaskId.CIMA, "Translate a short sentence about a cat.",
                 extras={"english_sentence": '"The black cat is under the table"'}, case_id="cima-0"),
        CaseInfo(TaskId.CIMA, "Translate a short sentence about a bag.",
                 extras={"english_sentence": '"The red bag is next to the chair"'}, case_id="cima-1"),
        CaseInfo(TaskId.CIMA, "Translate a short sentence about a dog.",
                 extras={"english_sentence": '"The small dog is in front of the house"'}, case_id="cima-2"),
    ),
    TaskId.CB: (
        CaseInfo(TaskId.CB, "Lightly used road bike, aluminum frame, new tires.",
                 numeric_slots={"listed_price": 150.0, "buyer_target_price": 100.0, "seller_desired_price": 150.0},
                 extras={"product": "road bike"}, case_id="cb-0"),
        CaseInfo(TaskId.CB, "Oak desk with two drawers, minor scratches on top.",
                 numeric_slots={"listed_price": 140.0, "buyer_target_price": 110.0, "seller_desired_price": 140.0},
                 extras={"product": "oak desk"}, case_id="cb-1"),
        CaseInfo(TaskId.CB, "Brass floor lamp, rewired last year, shade included.",
                 numeric_slots={"listed_price": 130.0, "buyer_target_price": 90.0, "seller_desired_price": 130.0},
                 extras={"product": "floor lamp"}, case_id="cb-2"),
    ),
    TaskId.P4G: (
        CaseInfo(TaskId.P4G, "The persuadee is a college student who has never donated online.", case_id="p4g-0"),
        CaseInfo(TaskId.P4G, "The persuadee is a retired teacher who already supports a local food bank.", case_id="p4g-1"),
        CaseInfo(TaskId.P4G, "The persuadee is skeptical of large international charities.", case_id="p4g-2"),
    ),
}
