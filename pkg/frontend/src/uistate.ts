// Editor state machine. The locked region is exactly the concatenation of
// the enriched statements the server has acknowledged, in order; undo pops
// whole statements back into the editable remainder. Pure data in, pure
// data out, so the law is directly testable without a DOM.

import { ChoicesView, GoalView } from './xml'

export interface UiState {
  // server-acknowledged enriched statements, oldest first
  lockedStatements: string[]
  remainder: string
  goals: GoalView[]
  pendingChoices: ChoicesView | null
  busy: boolean
  openFile: string | null
}

export function initialState(script = ''): UiState {
  return {
    lockedStatements: [],
    remainder: script,
    goals: [],
    pendingChoices: null,
    busy: false,
    openFile: null,
  }
}

export function lockedText(state: UiState): string {
  return state.lockedStatements.join('')
}

export function fullText(state: UiState): string {
  return lockedText(state) + state.remainder
}

// A successful (or partially successful) execute consumed `consumed`
// scalars of the remainder and replaced them with enriched statements.
export function applyExecuted(
  state: UiState,
  consumed: number,
  statements: string[],
  goals: GoalView[],
  choices: ChoicesView | null = null,
): UiState {
  if (consumed > state.remainder.length) {
    throw new Error('server consumed more than the remainder holds')
  }
  // choice offsets arrive relative to the submitted body; the consumed
  // prefix is leaving the remainder, so shift them to the new origin
  const shifted = choices === null
    ? null
    : { ...choices, offset: choices.offset - consumed }
  return {
    ...state,
    lockedStatements: state.lockedStatements.concat(statements),
    remainder: state.remainder.slice(consumed),
    goals,
    pendingChoices: shifted,
  }
}

// Undo acknowledged by the server: the last `steps` statements move back
// into the remainder as editable text.
export function applyUndo(
  state: UiState,
  steps: number,
  goals: GoalView[],
): UiState {
  const keep = state.lockedStatements.length - steps
  if (keep < 0) throw new Error('undo of more statements than are locked')
  const popped = state.lockedStatements.slice(keep)
  return {
    ...state,
    lockedStatements: state.lockedStatements.slice(0, keep),
    remainder: popped.join('') + state.remainder,
    goals,
    pendingChoices: null,
  }
}

// Editing is allowed only at or after the locked boundary.
export function editAllowed(state: UiState, offset: number): boolean {
  return offset >= lockedText(state).length
}

// User edit of the remainder invalidates any pending dialog offsets.
export function applyEdit(state: UiState, remainder: string): UiState {
  return { ...state, remainder, pendingChoices: null }
}

// Insert the hyperlink for a picked candidate at the dialog's offsets.
// Offsets in a choices response are relative to the submitted text, which
// is the remainder at the time of the request.
export function resolveChoice(state: UiState, uri: string): UiState {
  const choices = state.pendingChoices
  if (!choices) return state
  const { offset, length } = choices
  const token = state.remainder.slice(offset, offset + length)
  if (token !== choices.lexeme) {
    // stale dialog (remainder changed since the request); drop it
    return { ...state, pendingChoices: null }
  }
  const remainder =
    state.remainder.slice(0, offset) +
    `<A href="${uri}">` + token + '</A>' +
    state.remainder.slice(offset + length)
  return { ...state, remainder, pendingChoices: null }
}
