/**
 * Typed client for the registry service. Pure transport: no domain
 * computation happens here, every displayed fact is an API response field.
 */

export interface TopicVersion {
  seq_no: number;
  title: string;
  effective_date: string;
}

export interface Supervision {
  supervisor_id: string;
  start_date: string;
  end_date: string | null;
}

export interface Exam {
  subject: string;
  date: string;
  grade: string;
  passed: boolean;
}

export interface Activity {
  academic_year: string;
  kind: string;
  description: string;
  detail: string | null;
}

export interface DocumentRecord {
  kind: string;
  date: string;
  note: string | null;
}

export interface Enrollment {
  form: string;
  enrollment_date: string;
  term_months: number;
  basis: string;
}

export interface Dismissal {
  date: string;
  right_of_defense: boolean;
  note: string | null;
}

export interface Defense {
  date: string;
  outcome: string;
  note: string | null;
}

export interface Dossier {
  id: string;
  family_name: string;
  given_name: string;
  national_id: string | null;
  contact: string | null;
  status: string;
  competition: string | null;
  enrollment: Enrollment | null;
  dismissal: Dismissal | null;
  defense: Defense | null;
  topics: TopicVersion[];
  supervisions: Supervision[];
  exams: Exam[];
  activities: Activity[];
  documents: DocumentRecord[];
}

export interface Supervisor {
  id: string;
  family_name: string;
  given_name: string;
  habilitated: boolean;
  academic_title: string | null;
  department: string | null;
}

export interface Competition {
  id: string;
  announced_on: string;
  speciality: string;
  form: string;
  deadline: string;
  state: string;
}

export interface DossierFilters {
  status?: string;
  form?: string;
  year?: string;
  supervisor?: string;
  name?: string;
}

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Parse the service's error envelope; unknown shapes become UnknownError. */
export async function toApiError(response: Response): Promise<ApiError> {
  let code = "UnknownError";
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } };
    if (body?.error) {
      if (typeof body.error.code === "string") code = body.error.code;
      if (typeof body.error.message === "string") message = body.error.message;
    }
  } catch {
    // non-JSON body: keep the fallback
  }
  return new ApiError(code, message, response.status);
}

export class ApiClient {
  constructor(public readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await toApiError(response);
    return (await response.json()) as T;
  }

  private async requestBytes(path: string): Promise<Uint8Array> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) throw await toApiError(response);
    return new Uint8Array(await response.arrayBuffer());
  }

  listDossiers(filters: DossierFilters = {}): Promise<Dossier[]> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value) params.set(key, value);
    }
    const query = params.toString();
    return this.request("GET", `/api/doctorants${query ? "?" + query : ""}`);
  }

  getDossier(id: string): Promise<Dossier> {
    return this.request("GET", `/api/doctorants/${encodeURIComponent(id)}`);
  }

  getTopics(id: string): Promise<TopicVersion[]> {
    return this.request("GET", `/api/doctorants/${encodeURIComponent(id)}/topics`);
  }

  createDossier(body: {
    family_name: string;
    given_name: string;
    national_id?: string | null;
    competition_id?: string | null;
  }): Promise<Dossier> {
    return this.request("POST", "/api/doctorants", body);
  }

  enroll(id: string, body: {
    form: string;
    enrollment_date: string;
    term_months: number;
    basis: string;
    initial_topic_title: string;
  }): Promise<Dossier> {
    return this.request("POST", `/api/doctorants/${encodeURIComponent(id)}/enroll`, body);
  }

  dismiss(id: string, body: { date: string; right_of_defense: boolean; note?: string | null }): Promise<Dossier> {
    return this.request("POST", `/api/doctorants/${encodeURIComponent(id)}/dismiss`, body);
  }

  recordDefense(id: string, body: { date: string; outcome: string; note?: string | null }): Promise<Dossier> {
    return this.request("POST", `/api/doctorants/${encodeURIComponent(id)}/defense`, body);
  }

  changeTopic(id: string, body: { new_title: string; effective_date: string }): Promise<Dossier> {
    return this.request("POST", `/api/doctorants/${encodeURIComponent(id)}/topics`, body);
  }

  addExam(id: string, body: { subject: string; date: string; grade: string }): Promise<Dossier> {
    return this.request("POST", `/api/doctorants/${encodeURIComponent(id)}/exams`, body);
  }

  addActivity(id: string, body: {
    academic_year: string;
    kind: string;
    description: string;
    detail?: string | null;
  }): Promise<Dossier> {
    return this.request("POST", `/api/doctorants/${encodeURIComponent(id)}/activities`, body);
  }

  addDocument(id: string, body: { kind: string; date: string; note?: string | null }): Promise<Dossier> {
    return this.request("POST", `/api/doctorants/${encodeURIComponent(id)}/documents`, body);
  }

  assignSupervisor(id: string, body: { supervisor_id: string; start_date: string }): Promise<Dossier> {
    return this.request("POST", `/api/doctorants/${encodeURIComponent(id)}/supervisors`, body);
  }

  endSupervision(id: string, supervisorId: string, endDate: string): Promise<Dossier> {
    return this.request(
      "POST",
      `/api/doctorants/${encodeURIComponent(id)}/supervisors/${encodeURIComponent(supervisorId)}/end`,
      { end_date: endDate },
    );
  }

  listSupervisors(): Promise<Supervisor[]> {
    return this.request("GET", "/api/supervisors");
  }

  createSupervisor(body: {
    family_name: string;
    given_name: string;
    habilitated: boolean;
    academic_title?: string | null;
    department?: string | null;
  }): Promise<Supervisor> {
    return this.request("POST", "/api/supervisors", body);
  }

  listCompetitions(): Promise<Competition[]> {
    return this.request("GET", "/api/competitions");
  }

  createCompetition(body: {
    announced_on: string;
    speciality: string;
    form: string;
    deadline: string;
  }): Promise<Competition> {
    return this.request("POST", "/api/competitions", body);
  }

  closeCompetition(id: string): Promise<Competition> {
    return this.request("POST", `/api/competitions/${encodeURIComponent(id)}/close`);
  }

  reportPath(kind: "ministry" | "supervisor-load", params: { year?: string }): string;
  reportPath(kind: "individual-plan" | "activity", params: { id: string; year?: string }): string;
  reportPath(kind: string, params: { id?: string; year?: string }): string {
    const query = new URLSearchParams();
    if (params.year) query.set("year", params.year);
    const suffix = params.id ? `/${encodeURIComponent(params.id)}` : "";
    const qs = query.toString();
    return `/api/reports/${kind}${suffix}${qs ? "?" + qs : ""}`;
  }

  /** JSON report document, exactly as the service serialized it. */
  async reportJson(path: string): Promise<unknown> {
    const sep = path.includes("?") ? "&" : "?";
    const response = await fetch(this.baseUrl + path + sep + "format=json");
    if (!response.ok) throw await toApiError(response);
    return response.json();
  }

  /** Raw CSV bytes, saved by the download control without modification. */
  reportCsvBytes(path: string): Promise<Uint8Array> {
    const sep = path.includes("?") ? "&" : "?";
    return this.requestBytes(path + sep + "format=csv");
  }
}
