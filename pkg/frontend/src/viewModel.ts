/** Workbench view state: derives entirely from API responses plus local
 * drafts, so a refresh (hydrate) rebuilds the full view from the server.
 * Every displayed number is traceable to its artifact index. */

import type { ApiClient } from './api.js';
import { askAndAwait, type PollOptions } from './poll.js';
import {
  type BuilderState,
  combinationHint,
  emptyBuilder,
  prefillFromSuggestion,
} from './questionBuilder.js';
import type { Artifact, Question, QuestionCategory, SessionInfo } from './types.js';

export interface ArtifactCard {
  index: number; // tooltip anchor: the server-side artifact id
  category: string;
  artifact: Artifact;
  hint: string;
  suggestedFollowup: QuestionCategory;
}

export interface ComparisonMarkers {
  artifactIndex: number;
  metric: string;
  test: Record<string, number>;
  random: number;
  biased: number;
  verdicts: Record<string, string>;
}

export class WorkbenchViewModel {
  cards: ArtifactCard[] = [];
  builder: BuilderState = emptyBuilder();
  suggestion: { category: QuestionCategory; fromArtifact: number } | null = null;
  submitting = false;
  lastError: string | null = null;

  constructor(
    private readonly client: ApiClient,
    readonly session: SessionInfo,
    private readonly pollOptions: PollOptions = {},
  ) {}

  /** POST the question, poll at 500 ms, append the artifact card in order. */
  async ask(question: Question): Promise<ArtifactCard> {
    if (this.submitting) {
      throw new Error('a question is already submitting in this view');
    }
    this.submitting = true;
    try {
      const { artifact, index } = await askAndAwait(
        this.client,
        this.session.id,
        question.category,
        question.params,
        this.pollOptions,
      );
      const card = this.addCard(index, artifact);
      this.lastError = null;
      return card;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      throw err;
    } finally {
      this.submitting = false;
    }
  }

  private addCard(index: number, artifact: Artifact): ArtifactCard {
    const card: ArtifactCard = {
      index,
      category: artifact.kind,
      artifact,
      hint: combinationHint(artifact),
      suggestedFollowup: artifact.metadata.plan.suggested_followup,
    };
    this.cards = [...this.cards, card].sort((a, b) => a.index - b.index);
    this.suggestion = { category: card.suggestedFollowup, fromArtifact: index };
    return card;
  }

  /** One click on the surfaced suggestion prefills the builder. */
  acceptSuggestion(): BuilderState {
    if (!this.suggestion) throw new Error('no suggestion to accept');
    const source = this.cards.find((c) => c.index === this.suggestion!.fromArtifact);
    if (!source) throw new Error('suggestion source artifact missing');
    this.builder = prefillFromSuggestion(source.artifact);
    return this.builder;
  }

  /** Refresh-from-server: the client keeps no state the report cannot rebuild. */
  async hydrate(): Promise<void> {
    const report = await this.client.report(this.session.id);
    this.cards = report.sections
      .map((section) => ({
        index: section.index,
        category: section.category,
        artifact: section.artifact,
        hint: section.hint,
        suggestedFollowup: section.artifact.metadata.plan.suggested_followup,
      }))
      .sort((a, b) => a.index - b.index);
    const last = this.cards[this.cards.length - 1];
    this.suggestion = last
      ? { category: last.suggestedFollowup, fromArtifact: last.index }
      : null;
  }

  /** Three-marker number line data for rating artifacts. */
  comparison(card: ArtifactCard): ComparisonMarkers | null {
    const v = card.artifact.values as Record<string, unknown>;
    const baselines = v['baselines'] as { random: number; biased: number } | undefined;
    const scores = v['scores'] as Record<string, number> | undefined;
    if (!baselines || !scores) return null;
    const verdicts: Record<string, string> = {};
    const rawVerdicts = (v['verdicts'] ?? {}) as Record<string, { verdict: string }>;
    for (const [name, verdict] of Object.entries(rawVerdicts)) {
      verdicts[name] = verdict.verdict;
    }
    return {
      artifactIndex: card.index,
      metric: String(v['metric'] ?? ''),
      test: scores,
      random: baselines.random,
      biased: baselines.biased,
      verdicts,
    };
  }
}
